#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "covreg/history.hpp"

namespace covreg {

/// Simulation parameters shared by every protocol scenario.
struct SimConfig {
  std::uint64_t seed = 0;
  std::uint32_t replicas = 3;
  std::uint32_t writers = 1;
  std::uint32_t readers = 0;
  std::uint32_t ops_per_client = 1;
  std::uint32_t crashes = 0;
  /// Max reordering window over enqueue order; unset means full asynchrony.
  std::optional<std::uint64_t> delay_bound;

  /// Throws std::invalid_argument when crashes would break the replica
  /// majority or counts are degenerate.
  void validate() const;
};

class Sim;

/// Event-driven process. All state transitions happen inside on_message
/// (plus the initial start call); there are no threads.
class Automaton {
 public:
  virtual ~Automaton() = default;
  virtual void start(Sim&) {}
  virtual void on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) = 0;
};

struct SimStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_crash = 0;  // undelivered because of a crash
  std::uint64_t suppressed_send = 0;  // send attempted by a crashed process
};

/// Deterministic discrete-event scheduler. Each enqueued event draws a
/// pseudo-random priority from the seeded generator; delivery pops the
/// minimum (priority, enqueue order) among eligible events. With a delay
/// bound set, only events within the window after the oldest pending one
/// are eligible, capping reordering.
class Sim {
 public:
  explicit Sim(std::uint64_t seed, std::optional<std::uint64_t> delay_bound = std::nullopt);

  void add_process(ProcessId pid, Automaton* a);
  void send(ProcessId src, ProcessId dst, std::vector<std::uint8_t> payload);
  /// Queues a crash of `pid`; it takes effect when the scheduler picks it,
  /// so the crash point is seed-dependent like any message.
  void schedule_crash(ProcessId pid);
  /// Runs every process's start hook, then drains the event queue.
  void run();

  bool crashed(ProcessId pid) const { return crashed_.count(pid) != 0; }

  std::uint64_t next_op_id() { return ++op_id_; }
  void log_invoke(ProcessId proc, OpType op, std::uint64_t op_id, nlohmann::json args);
  void log_respond(ProcessId proc, OpType op, std::uint64_t op_id, nlohmann::json result);
  const History& history() const { return log_; }

  SimStats stats;

 private:
  struct Event {
    std::uint64_t priority = 0;
    bool is_crash = false;
    ProcessId src = kReservedPid;
    ProcessId dst = kReservedPid;
    std::vector<std::uint8_t> payload;
  };
  bool pop(Event& out);
  void apply_crash(ProcessId pid);

  std::mt19937_64 rng_;
  std::optional<std::uint64_t> delay_bound_;
  std::map<std::uint64_t, Event> pending_;  // keyed by enqueue counter
  std::uint64_t enq_ = 0;
  std::uint64_t log_seq_ = 0;
  std::uint64_t op_id_ = 0;
  std::map<ProcessId, Automaton*> procs_;
  std::set<ProcessId> crashed_;
  History log_;
};

/// Named one-shot gates for scripted interleavings. Continuations parked on
/// a closed gate run (in registration order) when it opens.
class GateBoard {
 public:
  void open(const std::string& gate, Sim& s);
  bool is_open(const std::string& gate) const { return open_.count(gate) != 0; }
  /// Runs `k` once all listed gates are open (immediately if they are).
  void when_open(std::vector<std::string> gates, Sim& s, std::function<void(Sim&)> k);

 private:
  struct Waiter {
    std::vector<std::string> gates;
    std::function<void(Sim&)> k;
  };
  bool ready(const Waiter& w) const;

  std::set<std::string> open_;
  std::vector<Waiter> waiting_;
};

}  // namespace covreg
