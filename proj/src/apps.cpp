#include "covreg/apps.hpp"

#include <map>
#include <optional>

namespace covreg {

RmwOutcome rmw(SeqRegister& reg, const ModifierFunction& f, ProcessId proc) {
  auto [oldval, lcver] = reg.read();
  Value newv = f(oldval);
  WriteOutcome out = reg.write(newv, lcver, proc);
  if (out.changed()) return RmwOutcome{out.value, RmwStatus::success};
  return RmwOutcome{out.value, RmwStatus::fail};
}

ReviseResult file_revise(SeqRegister& reg, const Value& v, const Tag& ver, ProcessId proc) {
  WriteOutcome out = reg.write(v, ver, proc);
  if (out.changed()) return ReviseOk{};
  return std::make_pair(out.value, out.tag);
}

std::pair<Value, Tag> file_get(const SeqRegister& reg) { return reg.read(); }

Value append_pid(const Value& v, ProcessId proc) {
  Value out = v;
  out.push_back(static_cast<std::uint8_t>(proc & 0xff));
  return out;
}

namespace {

struct RmwView {
  const OpRecord* op = nullptr;
  const OpRecord* read = nullptr;   // nested cvr-read
  const OpRecord* write = nullptr;  // nested cvr-write
};

Verdict fail_with(const History& h, std::string detail, const RmwView& v) {
  History cx;
  for (const auto& e : h)
    if (e.op_id == v.op->op_id || (v.read && e.op_id == v.read->op_id) ||
        (v.write && e.op_id == v.write->op_id))
      cx.push_back(e);
  return Verdict{"rmw", false, std::move(detail), std::move(cx)};
}

}  // namespace

Verdict check_rmw_history(const History& h) {
  auto records = pair_operations(h);
  std::vector<RmwView> views;
  for (const auto& r : records) {
    if (r.type != OpType::rmw || !r.complete()) continue;
    RmwView v;
    v.op = &r;
    // Nested register ops: same process, inside the rmw's interval.
    for (const auto& n : records) {
      if (n.proc != r.proc || !n.complete()) continue;
      if (n.invoke_seq < r.invoke_seq || *n.respond_seq > *r.respond_seq) continue;
      if (n.type == OpType::cvr_read) v.read = &n;
      if (n.type == OpType::cvr_write) v.write = &n;
    }
    if (!v.read || !v.write)
      return fail_with(h, "rmw without its nested read and write", v);
    views.push_back(v);
  }

  std::map<Tag, std::vector<const RmwView*>> groups;
  for (const auto& v : views) {
    bool success = v.op->result.at("status") == "success";
    bool chg = v.write->is_chg_write();
    if (success != chg)
      return fail_with(h, "rmw status does not match the nested write flag", v);
    if (success) {
      Value read_val = v.read->returned_value();
      Value expect = append_pid(read_val, v.op->proc);
      if (v.write->returned_value() != expect)
        return fail_with(h, "successful rmw wrote a value other than f(read value)", v);
    }
    groups[v.write->write_target()].push_back(&v);
  }

  for (const auto& [target, members] : groups) {
    bool any = false;
    for (const RmwView* m : members)
      if (m->op->result.at("status") == "success") any = true;
    if (!any)
      return fail_with(h,
                       "contention group on version " + to_string(target) +
                           " has no successful rmw",
                       *members.front());
  }

  // Solo rmw: concurrent with no other rmw operation.
  for (const auto& v : views) {
    bool solo = true;
    for (const auto& o : views) {
      if (o.op == v.op) continue;
      bool disjoint = o.op->precedes(*v.op) || v.op->precedes(*o.op);
      if (!disjoint) solo = false;
    }
    if (solo && v.op->result.at("status") != "success")
      return fail_with(h, "solo rmw failed", v);
  }

  return Verdict{"rmw", true, "", {}};
}

}  // namespace covreg
