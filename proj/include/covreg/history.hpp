#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "covreg/core.hpp"

namespace covreg {

enum class EventKind { invoke, respond };

enum class OpType { cvr_write, cvr_read, rmw, revise, get, propose };

const char* to_string(OpType op);
const char* to_string(EventKind k);
OpType op_from_string(const std::string& s);

/// One invocation or response record. `seq` is the logical timestamp the
/// simulator stamped the step with; real-time precedence between operations
/// is respond(A).seq < invoke(B).seq.
struct HistoryEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::invoke;
  ProcessId proc = kReservedPid;
  OpType op = OpType::cvr_read;
  std::uint64_t op_id = 0;
  nlohmann::json args = nlohmann::json::object();
  nlohmann::json result = nlohmann::json::object();  // respond only

  friend bool operator==(const HistoryEvent&, const HistoryEvent&) = default;
};

using History = std::vector<HistoryEvent>;

// Tag <-> [ts, wid] json helpers (the stable wire representation).
nlohmann::json tag_to_json(const Tag& t);
Tag tag_from_json(const nlohmann::json& j);

/// Serialize as newline-delimited records: one event per line,
///   seq kind proc op op_id args result
/// args/result are compact JSON; `-` stands for the absent result of an
/// invoke. Emission order is seq order; output is byte-stable.
std::string emit_history(const History& h);
History parse_history(const std::string& text);
History parse_history_stream(std::istream& in);

/// A complete (or pending) operation: paired invoke/respond.
struct OpRecord {
  OpType type = OpType::cvr_read;
  ProcessId proc = kReservedPid;
  std::uint64_t op_id = 0;
  std::uint64_t invoke_seq = 0;
  std::optional<std::uint64_t> respond_seq;  // nullopt: pending
  nlohmann::json args;
  nlohmann::json result;

  bool complete() const { return respond_seq.has_value(); }
  /// Real time: this op responds before `o` is invoked.
  bool precedes(const OpRecord& o) const {
    return complete() && *respond_seq < o.invoke_seq;
  }

  // Register-operation views (valid for cvr_write / cvr_read records).
  bool is_write() const { return type == OpType::cvr_write; }
  bool is_chg_write() const {
    return complete() && is_write() && result.at("flag") == "chg";
  }
  Tag write_target() const { return tag_from_json(args.at("ver")); }
  Tag returned_tag() const { return tag_from_json(result.at("tag")); }
  Value returned_value() const { return from_hex(result.at("val").get<std::string>()); }
};

struct MalformedHistory : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pair invokes with responds. Throws MalformedHistory if a respond has no
/// matching invoke or a process has two operations in flight at once.
std::vector<OpRecord> pair_operations(const History& h);

}  // namespace covreg
