#include <doctest.h>

#include "covreg/checker.hpp"
#include "covreg/scenario.hpp"
#include "covreg/simnet.hpp"

using namespace covreg;

namespace {

struct Recorder : Automaton {
  std::vector<std::uint8_t> got;
  void on_message(Sim&, ProcessId, const std::vector<std::uint8_t>& p) override {
    got.push_back(p.empty() ? 0 : p[0]);
  }
};

struct Burst : Automaton {
  ProcessId self, to;
  int n;
  Burst(ProcessId self, ProcessId to, int n) : self(self), to(to), n(n) {}
  void start(Sim& s) override {
    for (int i = 0; i < n; ++i) s.send(self, to, {static_cast<std::uint8_t>(i)});
  }
  void on_message(Sim&, ProcessId, const std::vector<std::uint8_t>&) override {}
};

std::vector<std::uint8_t> deliveries(std::uint64_t seed,
                                     std::optional<std::uint64_t> bound = std::nullopt) {
  Sim sim(seed, bound);
  Burst b(1, 2, 10);
  Recorder r;
  sim.add_process(1, &b);
  sim.add_process(2, &r);
  sim.run();
  return r.got;
}

}  // namespace

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.replicas = 5;
  cfg.crashes = 2;
  CHECK_NOTHROW(cfg.validate());
  cfg.crashes = 3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.crashes = 0;
  cfg.replicas = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.replicas = 3;
  cfg.writers = 0;
  cfg.readers = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("scheduling is a pure function of the seed") {
  CHECK(deliveries(5) == deliveries(5));
  CHECK(deliveries(5).size() == 10);
}

TEST_CASE("the scheduler actually reorders, and a zero delay bound forbids it") {
  bool reordered = false;
  for (std::uint64_t seed = 0; seed < 20 && !reordered; ++seed) {
    auto got = deliveries(seed);
    reordered = !std::is_sorted(got.begin(), got.end());
  }
  CHECK(reordered);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto got = deliveries(seed, 0);
    CHECK(std::is_sorted(got.begin(), got.end()));  // FIFO
  }
}

TEST_CASE("message accounting balances at quiescence") {
  Sim sim(9);
  Burst b(1, 2, 7);
  Recorder r;
  sim.add_process(1, &b);
  sim.add_process(2, &r);
  sim.run();
  CHECK(sim.stats.sent == 7);
  CHECK(sim.stats.delivered + sim.stats.dropped_crash == sim.stats.sent);
  CHECK(sim.stats.dropped_crash == 0);
}

TEST_CASE("a crash drops in-flight traffic and silences the victim") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Sim sim(seed);
    Burst b(1, 2, 7);
    Recorder r;
    sim.add_process(1, &b);
    sim.add_process(2, &r);
    sim.schedule_crash(2);
    sim.run();
    CHECK(sim.stats.delivered + sim.stats.dropped_crash == sim.stats.sent);
    CHECK(sim.stats.delivered == r.got.size());
    CHECK(sim.crashed(2));
    // After the crash, sends from the victim are suppressed at the source.
    sim.send(2, 1, {0xff});
    CHECK(sim.stats.suppressed_send == 1);
  }
}

TEST_CASE("gate board releases continuations in registration order") {
  Sim sim(1);
  GateBoard gates;
  std::vector<int> order;
  gates.when_open({"a", "b"}, sim, [&](Sim&) { order.push_back(1); });
  gates.when_open({"a"}, sim, [&](Sim&) { order.push_back(2); });
  CHECK(order.empty());
  gates.open("a", sim);
  CHECK(order == std::vector<int>{2});
  CHECK(gates.is_open("a"));
  gates.open("b", sim);
  CHECK(order == std::vector<int>{2, 1});
  // Already-open gates run the continuation immediately.
  gates.when_open({"a", "b"}, sim, [&](Sim&) { order.push_back(3); });
  CHECK(order == std::vector<int>{2, 1, 3});
}

TEST_CASE("scenario runs are deterministic in the config") {
  ScenarioConfig cfg;
  cfg.sim.seed = 42;
  cfg.sim.replicas = 5;
  cfg.sim.writers = 3;
  cfg.sim.readers = 2;
  cfg.sim.ops_per_client = 5;
  cfg.sim.crashes = 1;
  RunResult a = run_scenario(cfg);
  RunResult b = run_scenario(cfg);
  CHECK(emit_history(a.history) == emit_history(b.history));
  CHECK(a.stats.sent == b.stats.sent);
  CHECK(a.incomplete.empty());
}

TEST_CASE("crash runs keep the books balanced and the clients live") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ScenarioConfig cfg;
    cfg.sim.seed = seed;
    cfg.sim.replicas = 5;
    cfg.sim.writers = 2;
    cfg.sim.readers = 1;
    cfg.sim.ops_per_client = 3;
    cfg.sim.crashes = 2;
    RunResult r = run_scenario(cfg);
    CHECK(r.incomplete.empty());
    CHECK(r.stats.delivered + r.stats.dropped_crash == r.stats.sent);
  }
}

TEST_CASE("two concurrent initial writers can both return chg") {
  // Both writers revise TAG0; some schedule lets both succeed with sibling
  // tags (1,1) and (1,2).
  bool both = false;
  for (std::uint64_t seed = 0; seed < 200 && !both; ++seed) {
    ScenarioConfig cfg;
    cfg.sim.seed = seed;
    cfg.sim.replicas = 5;
    cfg.sim.writers = 2;
    cfg.sim.ops_per_client = 1;
    RunResult r = run_scenario(cfg);
    std::set<Tag> chg;
    for (const auto& op : pair_operations(r.history))
      if (op.is_chg_write()) chg.insert(op.returned_tag());
    both = chg == std::set<Tag>{Tag{1, 1}, Tag{1, 2}};
  }
  CHECK(both);
}
