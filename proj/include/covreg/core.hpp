#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace covreg {

/// Unique process identity. Id 0 is reserved and never names a real writer.
using ProcessId = std::uint32_t;

inline constexpr ProcessId kReservedPid = 0;

/// Version identifier: (sequence number, writer id), ordered lexicographically.
struct Tag {
  std::uint64_t ts = 0;
  ProcessId wid = kReservedPid;

  friend constexpr auto operator<=>(const Tag& a, const Tag& b) {
    if (auto c = a.ts <=> b.ts; c != 0) return c;
    return a.wid <=> b.wid;
  }
  friend constexpr bool operator==(const Tag&, const Tag&) = default;
};

/// The initial version of every register.
inline constexpr Tag kTag0{0, kReservedPid};

enum class Ordering { less, equal, greater };

constexpr Ordering tag_compare(const Tag& a, const Tag& b) {
  if (a < b) return Ordering::less;
  if (b < a) return Ordering::greater;
  return Ordering::equal;
}

/// Next version a writer w derives from t. Throws on the reserved writer id
/// and on sequence overflow (wraparound is never silent).
inline Tag tag_successor(const Tag& t, ProcessId w) {
  if (w == kReservedPid) throw std::invalid_argument("writer id 0 is reserved");
  if (t.ts == std::numeric_limits<std::uint64_t>::max())
    throw std::overflow_error("tag sequence overflow");
  return Tag{t.ts + 1, w};
}

/// Register values are opaque byte strings; equality is byte-wise.
using Value = std::vector<std::uint8_t>;

std::string to_hex(const Value& v);
Value from_hex(const std::string& s);

enum class WriteFlag { chg, unchg };

inline const char* to_string(WriteFlag f) {
  return f == WriteFlag::chg ? "chg" : "unchg";
}

/// Result of a coverable write: the register pair it settled on plus whether
/// this operation produced it.
struct WriteOutcome {
  Value value;
  Tag tag;
  WriteFlag flag = WriteFlag::unchg;

  bool changed() const { return flag == WriteFlag::chg; }
};

struct RegisterState {
  Value value;
  Tag tag;
};

inline std::string to_string(const Tag& t) {
  return "(" + std::to_string(t.ts) + "," + std::to_string(t.wid) + ")";
}

}  // namespace covreg
