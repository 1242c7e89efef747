#include <doctest.h>

#include <limits>

#include "covreg/core.hpp"

using namespace covreg;

TEST_CASE("tag ordering is lexicographic on (ts, wid)") {
  CHECK(Tag{1, 1} < Tag{2, 1});
  CHECK(Tag{1, 2} < Tag{2, 1});
  CHECK(Tag{2, 1} < Tag{2, 2});
  CHECK(Tag{3, 4} == Tag{3, 4});
  CHECK(tag_compare(Tag{1, 1}, Tag{1, 2}) == Ordering::less);
  CHECK(tag_compare(Tag{5, 9}, Tag{5, 9}) == Ordering::equal);
  CHECK(tag_compare(Tag{2, 1}, Tag{1, 9}) == Ordering::greater);
}

TEST_CASE("tag_successor bumps the sequence and records the writer") {
  CHECK(tag_successor(kTag0, 1) == Tag{1, 1});
  CHECK(tag_successor(Tag{4, 2}, 7) == Tag{5, 7});
  // Successor is strictly greater regardless of writer ids.
  for (ProcessId w : {1u, 2u, 100u}) CHECK(Tag{4, 2} < tag_successor(Tag{4, 2}, w));
}

TEST_CASE("tag_successor rejects the reserved writer and overflow") {
  CHECK_THROWS_AS(tag_successor(kTag0, kReservedPid), std::invalid_argument);
  Tag maxed{std::numeric_limits<std::uint64_t>::max(), 1};
  CHECK_THROWS_AS(tag_successor(maxed, 1), std::overflow_error);
}

TEST_CASE("hex round trip") {
  Value v{0x00, 0x01, 0xab, 0xff};
  CHECK(to_hex(v) == "0001abff");
  CHECK(from_hex("0001abff") == v);
  CHECK(from_hex("") == Value{});
  CHECK(to_hex({}) == "");
  CHECK_THROWS(from_hex("abc"));   // odd length
  CHECK_THROWS(from_hex("zz"));    // non-hex
}
