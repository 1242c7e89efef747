#include <doctest.h>

#include <random>

#include "covreg/ranked.hpp"

using namespace covreg;

namespace {

std::vector<RankedOp> random_schedule(std::mt19937_64& rng) {
  std::vector<RankedOp> ops;
  std::size_t n = 1 + rng() % 12;
  for (std::size_t i = 0; i < n; ++i) {
    RankedOp op;
    op.is_write = rng() % 2 == 0;
    op.rank = 1 + rng() % 10;
    if (op.is_write) op.val = Value{static_cast<std::uint8_t>('a' + rng() % 4)};
    ops.push_back(op);
  }
  return ops;
}

}  // namespace

TEST_CASE("first write commits under both policies") {
  for (RankedPolicy policy : {RankedPolicy::permissive, RankedPolicy::strict}) {
    RankedRegister reg(policy);
    auto out = reg.rr_write(1, Value{'a'});
    CHECK(out.committed);  // nothing higher exists, abort is forbidden
    auto [rank, val] = reg.rr_read(2);
    CHECK(rank == 1);
    CHECK(val == Value{'a'});
  }
}

TEST_CASE("fresh register reads the initial pair at any rank") {
  RankedRegister reg(RankedPolicy::permissive, Value{'i'});
  auto [rank, val] = reg.rr_read(5);
  CHECK(rank == kRank0);
  CHECK(val == Value{'i'});
}

TEST_CASE("permissive: a lower-rank write may commit without clobbering safety") {
  // The schedule the impossibility argument leans on: rank 2 commits after a
  // committed rank-5 write, yet a higher-rank read still returns the rank-5
  // pair.
  RankedRegister reg(RankedPolicy::permissive);
  CHECK(reg.rr_write(5, Value{'a'}).committed);
  auto low = reg.rr_write(2, Value{'b'});
  CHECK(low.committed);
  CHECK(low.observed == 5);
  auto [rank, val] = reg.rr_read(7);
  CHECK(rank == 5);
  CHECK(val == Value{'a'});
}

TEST_CASE("strict: lower-rank writes abort and report the higher rank") {
  RankedRegister reg(RankedPolicy::strict);
  CHECK(reg.rr_write(5, Value{'a'}).committed);
  auto out = reg.rr_write(2, Value{'b'});
  CHECK_FALSE(out.committed);
  CHECK(out.observed > 2);  // Non-Triviality witness
  CHECK(reg.rr_write(6, Value{'c'}).committed);
  auto [rank, val] = reg.rr_read(9);
  CHECK(rank == 6);
  CHECK(val == Value{'c'});
}

TEST_CASE("scripted lower-rank-commit schedule verifies cleanly") {
  std::vector<RankedOp> schedule{
      {true, 5, Value{'a'}},
      {true, 2, Value{'b'}},
      {false, 7, {}},
  };
  std::vector<RankedStep> transcript;
  CHECK(run_ranked_schedule(RankedPolicy::permissive, {}, schedule, &transcript) == "");
  REQUIRE(transcript.size() == 3);
  CHECK(transcript[0].committed);
  CHECK(transcript[1].committed);  // the permissive lower-rank commit
  CHECK(transcript[2].out_rank == 5);
}

TEST_CASE("safety and non-triviality hold on fuzzed schedules") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 2000; ++i) {
    auto schedule = random_schedule(rng);
    for (RankedPolicy policy : {RankedPolicy::permissive, RankedPolicy::strict}) {
      std::string err = run_ranked_schedule(policy, Value{'i'}, schedule);
      CAPTURE(i);
      CHECK(err == "");
    }
  }
}
