#pragma once

#include <map>
#include <memory>
#include <optional>

#include "covreg/register_client.hpp"

namespace covreg {

/// One value-version pair under agreement.
struct Proposal {
  Value val;
  Tag ver;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

/// Local per-version consensus oracle: the first real proposal on an
/// undecided instance decides it; probes (no proposal) never decide.
class ConsensusOracle {
 public:
  /// Returns the decided proposal of `instance`, deciding it with `p` first
  /// when it is still open and `p` is present. nullopt means undecided.
  std::optional<Proposal> propose(const Tag& instance, const std::optional<Proposal>& p);

  const std::map<Tag, Proposal>& decided() const { return decided_; }

 private:
  std::map<Tag, Proposal> decided_;
};

/// The version a write on `ver` by `proc` would install: strictly larger and
/// unique per (ver, proc).
Tag generate_version(const Tag& ver, ProcessId proc);

/// Strongly coverable register built on a per-version consensus oracle.
/// Each oracle call is one scheduler step (a self-addressed message), so
/// concurrent clients interleave under the simulator.
class StrongClient : public RegisterClient {
 public:
  StrongClient(ProcessId pid, std::shared_ptr<ConsensusOracle> oracle, Value initial = {});

  void cvr_write(Sim& s, const Value& val, const Tag& ver, WriteCb done) override;
  void cvr_read(Sim& s, ReadCb done) override;
  void on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) override;

 private:
  enum class Phase { idle, write_propose, chase, read_probe };
  void arm(Sim& s);
  void finish_unchg(Sim& s);

  ProcessId pid_;
  std::shared_ptr<ConsensusOracle> oracle_;
  Phase phase_ = Phase::idle;
  bool in_write_ = false;
  Value arg_val_;
  Tag arg_ver_;
  Tag ver_new_;
  Value lcval_;  // cursor pair, persistent across operations
  Tag lcver_ = kTag0;
  WriteCb wdone_;
  ReadCb rdone_;
};

}  // namespace covreg
