#include <doctest.h>

#include <memory>

#include "covreg/checker.hpp"
#include "covreg/ldr.hpp"
#include "covreg/scenario.hpp"
#include "support.hpp"

using namespace covreg;

namespace {

Value v(const char* s) { return Value(s, s + std::char_traits<char>::length(s)); }

struct Sink : Automaton {
  std::vector<ldr::Message> got;
  void on_message(Sim&, ProcessId, const std::vector<std::uint8_t>& p) override {
    got.push_back(ldr::decode(p));
  }
};

ScenarioConfig ldr_config(std::uint64_t seed, std::uint32_t f, std::uint32_t crashes) {
  ScenarioConfig cfg;
  cfg.protocol = Protocol::ldr;
  cfg.ldr_f = f;
  cfg.directories = 5;
  cfg.sim.seed = seed;
  cfg.sim.replicas = 2 * f + 2;
  cfg.sim.writers = 2;
  cfg.sim.readers = 2;
  cfg.sim.ops_per_client = 3;
  cfg.sim.crashes = crashes;
  return cfg;
}

}  // namespace

TEST_CASE("message encode/decode round trip") {
  // Fields are per-kind: metadata messages carry locations, bulk ones values.
  ldr::Message meta;
  meta.kind = ldr::MsgKind::put_meta;
  meta.op_id = 9;
  meta.tag = Tag{4, 2};
  meta.locations = {7, 8, 9};
  ldr::Message back = ldr::decode(ldr::encode(meta));
  CHECK(back.kind == meta.kind);
  CHECK(back.op_id == meta.op_id);
  CHECK(back.tag == meta.tag);
  CHECK(back.locations == meta.locations);

  ldr::Message bulk;
  bulk.kind = ldr::MsgKind::put;
  bulk.op_id = 10;
  bulk.tag = Tag{4, 2};
  bulk.value = v("blob");
  ldr::Message back2 = ldr::decode(ldr::encode(bulk));
  CHECK(back2.kind == bulk.kind);
  CHECK(back2.op_id == bulk.op_id);
  CHECK(back2.tag == bulk.tag);
  CHECK(back2.value == bulk.value);
}

TEST_CASE("directory stores only larger tags with at least f+1 locations") {
  const std::uint32_t f = 1;
  Sim sim(1);
  Sink client;
  ldr::Directory dir(2, f, {10, 11, 12, 13});
  sim.add_process(1, &client);
  sim.add_process(2, &dir);

  // Bootstrap: TAG0 located at every replica.
  CHECK(dir.tag() == kTag0);
  CHECK(dir.locations() == std::vector<ProcessId>{10, 11, 12, 13});

  // |S| = f is rejected (not stored), still acked.
  dir.on_message(sim, 1, ldr::encode({ldr::MsgKind::put_meta, 1, Tag{1, 1}, {10}, {}}));
  CHECK(dir.tag() == kTag0);

  // |S| = f+1 with a larger tag is stored.
  dir.on_message(sim, 1, ldr::encode({ldr::MsgKind::put_meta, 2, Tag{1, 1}, {10, 11}, {}}));
  CHECK(dir.tag() == Tag{1, 1});
  CHECK(dir.locations() == std::vector<ProcessId>{10, 11});

  // Smaller or equal tag: state unchanged.
  dir.on_message(sim, 1, ldr::encode({ldr::MsgKind::put_meta, 3, Tag{1, 1}, {12, 13}, {}}));
  dir.on_message(sim, 1, ldr::encode({ldr::MsgKind::put_meta, 4, Tag{0, 0}, {12, 13}, {}}));
  CHECK(dir.tag() == Tag{1, 1});
  CHECK(dir.locations() == std::vector<ProcessId>{10, 11});

  // get-metadata reports the stored pair; every put-metadata was acked.
  dir.on_message(sim, 1, ldr::encode({ldr::MsgKind::get_meta, 5, {}, {}, {}}));
  sim.run();
  REQUIRE(client.got.size() == 5);
  int acks = 0;
  const ldr::Message* reply = nullptr;
  for (const auto& m : client.got) {
    if (m.kind == ldr::MsgKind::meta_ack) ++acks;
    if (m.kind == ldr::MsgKind::meta_reply) reply = &m;
  }
  CHECK(acks == 4);
  REQUIRE(reply != nullptr);
  CHECK(reply->tag == Tag{1, 1});
  CHECK(reply->locations == std::vector<ProcessId>{10, 11});

  // Directory tags are monotone.
  CHECK(std::is_sorted(dir.tag_history().begin(), dir.tag_history().end()));
}

TEST_CASE("replica server: append-only store, silent on unknown tags") {
  Sim sim(1);
  Sink client;
  ldr::ReplicaServer rep(2, v("init"));
  sim.add_process(1, &client);
  sim.add_process(2, &rep);

  CHECK(rep.store().at(kTag0) == v("init"));  // bootstrap pair

  rep.on_message(sim, 1, ldr::encode({ldr::MsgKind::put, 1, Tag{1, 1}, {}, v("a")}));
  CHECK(rep.store().at(Tag{1, 1}) == v("a"));

  // get for a stored tag replies with the value.
  rep.on_message(sim, 1, ldr::encode({ldr::MsgKind::get, 2, Tag{1, 1}, {}, {}}));
  // get for an unknown tag is ignored: no reply at all.
  rep.on_message(sim, 1, ldr::encode({ldr::MsgKind::get, 3, Tag{9, 9}, {}, {}}));
  sim.run();
  REQUIRE(client.got.size() == 2);  // put_ack + one get_reply, nothing for (9,9)
  const ldr::Message* got_reply = nullptr;
  int put_acks = 0;
  for (const auto& m : client.got) {
    if (m.kind == ldr::MsgKind::put_ack) ++put_acks;
    if (m.kind == ldr::MsgKind::get_reply) got_reply = &m;
  }
  CHECK(put_acks == 1);
  REQUIRE(got_reply != nullptr);
  CHECK(got_reply->value == v("a"));
}

TEST_CASE("solo write is chg; a stale write fetches the committed value") {
  const std::uint32_t f = 1;
  std::vector<ProcessId> dirs{20, 21, 22};
  std::vector<ProcessId> reps{30, 31, 32, 33};
  Sim sim(5);
  ldr::Client client(1, f, dirs, reps);
  testsupport::ClientShim shim(&client);
  sim.add_process(1, &shim);
  std::vector<std::unique_ptr<Automaton>> servers;
  for (ProcessId d : dirs) {
    servers.push_back(std::make_unique<ldr::Directory>(d, f, reps));
    sim.add_process(d, servers.back().get());
  }
  for (ProcessId r : reps) {
    servers.push_back(std::make_unique<ldr::ReplicaServer>(r, v("v0")));
    sim.add_process(r, servers.back().get());
  }

  std::optional<WriteOutcome> first, second;
  std::optional<std::pair<Value, Tag>> read;
  client.cvr_write(sim, v("big-a"), kTag0, [&](Sim& s, const WriteOutcome& o) {
    first = o;
    client.cvr_write(s, v("big-b"), kTag0, [&](Sim& s2, const WriteOutcome& o2) {
      second = o2;
      client.cvr_read(s2, [&](Sim&, const Value& rv, const Tag& rt) { read = {rv, rt}; });
    });
  });
  sim.run();
  REQUIRE(first.has_value());
  REQUIRE(second.has_value());
  REQUIRE(read.has_value());
  CHECK(first->changed());
  CHECK(first->tag == Tag{1, 1});
  CHECK_FALSE(second->changed());
  CHECK(second->tag == Tag{1, 1});
  CHECK(second->value == v("big-a"));  // fetched from a replica in S
  CHECK(*read == std::pair{v("big-a"), Tag{1, 1}});
  CHECK(client.fetch_stats().fetches >= 1);
  CHECK(client.fetch_stats().replies >= client.fetch_stats().fetches);
  CHECK(client.fetch_stats().contacted <= (f + 1) * client.fetch_stats().fetches);
}

TEST_CASE("fuzzed runs pass the full suite, with and without crashes") {
  for (std::uint32_t f : {1u, 2u}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      ScenarioConfig cfg = ldr_config(seed, f, seed % (f + 1));
      RunResult r = run_scenario(cfg);
      CAPTURE(f);
      CAPTURE(seed);
      CHECK(r.incomplete.empty());
      CHECK(r.stats.delivered + r.stats.dropped_crash == r.stats.sent);
      for (const Verdict& verdict : check_all(r.history)) {
        CAPTURE(verdict.property);
        CHECK(verdict.pass);
      }
      for (const auto& [pid, tags] : r.server_tags)
        CHECK(std::is_sorted(tags.begin(), tags.end()));
      CHECK(r.fetch.replies >= r.fetch.fetches);
      CHECK(r.fetch.contacted <= (f + 1) * r.fetch.fetches);
    }
  }
}
