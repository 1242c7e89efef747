#include "covreg/ranked.hpp"

#include <algorithm>
#include <map>

namespace covreg {

RankedRegister::WriteResult RankedRegister::rr_write(Rank r, const Value& v) {
  if (policy_ == RankedPolicy::strict && r < highest_) {
    // Non-Triviality holds: highest_ was set by an earlier operation.
    return WriteResult{false, highest_};
  }
  highest_ = std::max(highest_, r);
  if (committed_ == kRank0 || r >= committed_) {
    committed_ = r;
    val_ = v;
  }
  return WriteResult{true, highest_};
}

std::pair<Rank, Value> RankedRegister::rr_read(Rank r) {
  highest_ = std::max(highest_, r);
  return {committed_, val_};
}

std::string run_ranked_schedule(RankedPolicy policy, const Value& initial,
                                const std::vector<RankedOp>& schedule,
                                std::vector<RankedStep>* transcript) {
  RankedRegister reg(policy, initial);
  // Model state for the property checks.
  std::map<Rank, Value> committed;  // committed writes so far
  Rank max_seen = kRank0;           // highest rank used by any earlier op
  bool any_earlier = false;

  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const RankedOp& op = schedule[i];
    RankedStep step;
    step.op = op;
    if (op.is_write) {
      auto res = reg.rr_write(op.rank, op.val);
      step.committed = res.committed;
      step.observed = res.observed;
      if (!res.committed) {
        // Non-Triviality: an abort needs an earlier or concurrent operation
        // with a strictly higher rank; the schedule is sequential, so it
        // must be an earlier one.
        if (!any_earlier || !(max_seen > op.rank))
          return "non-triviality: write with rank " + std::to_string(op.rank) +
                 " aborted at step " + std::to_string(i) + " with no higher-rank operation";
        if (!(res.observed > op.rank))
          return "abort at step " + std::to_string(i) +
                 " did not report a rank above the invoker's";
      }
      if (res.committed) committed[op.rank] = op.val;
    } else {
      auto [rk, v] = reg.rr_read(op.rank);
      step.out_rank = rk;
      step.out_val = v;
      // Safety clause 1: a written pair or the initial one.
      bool known = (rk == kRank0 && v == initial);
      auto it = committed.find(rk);
      if (it != committed.end() && it->second == v) known = true;
      if (!known)
        return "safety: read at step " + std::to_string(i) + " returned an unwritten pair";
      // Safety clause 2: no committed write below this read's rank may be
      // hidden behind an even smaller returned rank.
      for (const auto& [wr, wv] : committed)
        if (op.rank > wr && !(rk >= wr))
          return "safety: read at step " + std::to_string(i) + " with rank " +
                 std::to_string(op.rank) + " returned rank " + std::to_string(rk) +
                 " below committed rank " + std::to_string(wr);
    }
    max_seen = std::max(max_seen, op.rank);
    any_earlier = true;
    if (transcript) transcript->push_back(std::move(step));
  }
  return "";
}

}  // namespace covreg
