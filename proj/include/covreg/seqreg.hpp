#pragma once

#include <set>
#include <utility>

#include "covreg/core.hpp"

namespace covreg {

/// Sequential versioned register: the executable transition relation.
/// A write that names the current version advances the register and yields
/// chg; any other write leaves it untouched and yields unchg with the
/// current pair. The checker uses this as its linearization ground truth.
class SeqRegister {
 public:
  explicit SeqRegister(Value initial = {})
      : state_{std::move(initial), kTag0}, produced_{kTag0} {}

  WriteOutcome write(const Value& v, const Tag& ver, ProcessId w) {
    if (w == kReservedPid) throw std::invalid_argument("writer id 0 is reserved");
    if (ver == state_.tag) {
      Tag next = tag_successor(ver, w);
      state_ = RegisterState{v, next};
      produced_.insert(next);
      return WriteOutcome{v, next, WriteFlag::chg};
    }
    return WriteOutcome{state_.value, state_.tag, WriteFlag::unchg};
  }

  std::pair<Value, Tag> read() const { return {state_.value, state_.tag}; }

  const RegisterState& state() const { return state_; }
  const std::set<Tag>& produced() const { return produced_; }

 private:
  RegisterState state_;
  std::set<Tag> produced_;
};

}  // namespace covreg
