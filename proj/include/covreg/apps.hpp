#pragma once

#include <functional>
#include <string>
#include <variant>

#include "covreg/checker.hpp"
#include "covreg/seqreg.hpp"

namespace covreg {

using ModifierFunction = std::function<Value(const Value&)>;

enum class RmwStatus { success, fail };

struct RmwOutcome {
  Value value;
  RmwStatus status = RmwStatus::fail;
};

/// Read-modify-write over a sequential register: read, apply f, write back
/// against the version the read returned. No internal retry.
RmwOutcome rmw(SeqRegister& reg, const ModifierFunction& f, ProcessId proc);

/// Either OK (the revision landed) or the newer pair to rebase onto.
struct ReviseOk {};
using ReviseResult = std::variant<ReviseOk, std::pair<Value, Tag>>;

ReviseResult file_revise(SeqRegister& reg, const Value& v, const Tag& ver, ProcessId proc);
std::pair<Value, Tag> file_get(const SeqRegister& reg);

/// The canonical modifier used by simulated rmw workloads: append the
/// writer's id as one byte. Lets the checker recompute expected values.
Value append_pid(const Value& v, ProcessId proc);

/// Checks the weak-RMW guarantees on a history of rmw operations (with the
/// nested register operations logged between each rmw's invoke/respond):
///   - every contention group (rmw writes naming one version) has a success,
///   - every solo rmw succeeds,
///   - every success wrote append_pid(read value, proc).
Verdict check_rmw_history(const History& h);

}  // namespace covreg
