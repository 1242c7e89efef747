#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covreg/core.hpp"

namespace covreg {

using Rank = std::uint64_t;
inline constexpr Rank kRank0 = 0;

/// permissive: writes always commit; a lower-rank commit does not displace a
/// higher-rank committed pair (this keeps Safety while exhibiting the
/// out-of-order commit the impossibility argument relies on).
/// strict: a write under the highest observed rank aborts.
enum class RankedPolicy { permissive, strict };

class RankedRegister {
 public:
  struct WriteResult {
    bool committed = false;
    Rank observed = kRank0;  // highest rank seen at the register
  };

  explicit RankedRegister(RankedPolicy policy = RankedPolicy::permissive, Value initial = {})
      : policy_(policy), val_(std::move(initial)) {}

  WriteResult rr_write(Rank r, const Value& v);
  std::pair<Rank, Value> rr_read(Rank r);

  Rank highest_seen() const { return highest_; }

 private:
  RankedPolicy policy_;
  Rank committed_ = kRank0;
  Value val_;  // pair with committed_; initial value until a commit lands
  Rank highest_ = kRank0;
};

/// One step of a scripted schedule.
struct RankedOp {
  bool is_write = false;
  Rank rank = kRank0;
  Value val;  // writes only
};

struct RankedStep {
  RankedOp op;
  bool committed = false;   // writes
  Rank observed = kRank0;   // writes: highest rank reported on the outcome
  Rank out_rank = kRank0;   // reads
  Value out_val;            // reads
};

/// Applies the schedule and verifies Safety and Non-Triviality on the
/// resulting sequential run. Returns an empty string on success, else a
/// description of the first violation.
std::string run_ranked_schedule(RankedPolicy policy, const Value& initial,
                                const std::vector<RankedOp>& schedule,
                                std::vector<RankedStep>* transcript = nullptr);

}  // namespace covreg
