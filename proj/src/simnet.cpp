#include "covreg/simnet.hpp"

#include <limits>
#include <stdexcept>

namespace covreg {

void SimConfig::validate() const {
  if (replicas == 0) throw std::invalid_argument("replicas must be positive");
  if (writers + readers == 0) throw std::invalid_argument("no clients configured");
  // Liveness needs a replica majority to survive every crash pattern.
  if (crashes > (replicas - 1) / 2)
    throw std::invalid_argument("crash budget " + std::to_string(crashes) +
                                " breaks the majority of " + std::to_string(replicas) +
                                " replicas");
}

Sim::Sim(std::uint64_t seed, std::optional<std::uint64_t> delay_bound)
    : rng_(seed), delay_bound_(delay_bound) {}

void Sim::add_process(ProcessId pid, Automaton* a) {
  if (!procs_.emplace(pid, a).second)
    throw std::invalid_argument("duplicate process id " + std::to_string(pid));
}

void Sim::send(ProcessId src, ProcessId dst, std::vector<std::uint8_t> payload) {
  if (crashed_.count(src)) {
    ++stats.suppressed_send;
    return;
  }
  if (!procs_.count(dst)) throw std::invalid_argument("send to unknown process");
  Event e;
  e.priority = rng_();
  e.src = src;
  e.dst = dst;
  e.payload = std::move(payload);
  ++stats.sent;
  pending_.emplace(++enq_, std::move(e));
}

void Sim::schedule_crash(ProcessId pid) {
  Event e;
  e.priority = rng_();
  e.is_crash = true;
  e.dst = pid;
  pending_.emplace(++enq_, std::move(e));
}

bool Sim::pop(Event& out) {
  if (pending_.empty()) return false;
  std::uint64_t oldest = pending_.begin()->first;
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
  if (delay_bound_ && oldest + *delay_bound_ >= oldest) limit = oldest + *delay_bound_;
  auto best = pending_.begin();
  for (auto it = pending_.begin(); it != pending_.end() && it->first <= limit; ++it)
    if (it->second.priority < best->second.priority) best = it;
  out = std::move(best->second);
  pending_.erase(best);
  return true;
}

void Sim::apply_crash(ProcessId pid) {
  crashed_.insert(pid);
  // In-flight messages to or from the crashed process are lost.
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (!it->second.is_crash && (it->second.src == pid || it->second.dst == pid)) {
      ++stats.dropped_crash;
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
}

void Sim::run() {
  for (auto& [pid, a] : procs_) a->start(*this);
  Event e;
  while (pop(e)) {
    if (e.is_crash) {
      apply_crash(e.dst);
      continue;
    }
    if (crashed_.count(e.dst)) {
      ++stats.dropped_crash;
      continue;
    }
    ++stats.delivered;
    procs_.at(e.dst)->on_message(*this, e.src, e.payload);
  }
}

void Sim::log_invoke(ProcessId proc, OpType op, std::uint64_t op_id, nlohmann::json args) {
  HistoryEvent ev;
  ev.seq = ++log_seq_;
  ev.kind = EventKind::invoke;
  ev.proc = proc;
  ev.op = op;
  ev.op_id = op_id;
  ev.args = std::move(args);
  log_.push_back(std::move(ev));
}

void Sim::log_respond(ProcessId proc, OpType op, std::uint64_t op_id, nlohmann::json result) {
  HistoryEvent ev;
  ev.seq = ++log_seq_;
  ev.kind = EventKind::respond;
  ev.proc = proc;
  ev.op = op;
  ev.op_id = op_id;
  ev.result = std::move(result);
  log_.push_back(std::move(ev));
}

bool GateBoard::ready(const Waiter& w) const {
  for (const auto& g : w.gates)
    if (!open_.count(g)) return false;
  return true;
}

void GateBoard::open(const std::string& gate, Sim& s) {
  if (!open_.insert(gate).second) return;
  // Release in registration order; a released continuation may open gates,
  // so sweep until a fixed point.
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (std::size_t i = 0; i < waiting_.size(); ++i) {
      if (!waiting_[i].k || !ready(waiting_[i])) continue;
      auto k = std::move(waiting_[i].k);
      waiting_[i].k = nullptr;
      k(s);
      progressed = true;
    }
  }
}

void GateBoard::when_open(std::vector<std::string> gates, Sim& s, std::function<void(Sim&)> k) {
  Waiter w{std::move(gates), std::move(k)};
  if (ready(w)) {
    w.k(s);
    return;
  }
  waiting_.push_back(std::move(w));
}

}  // namespace covreg
