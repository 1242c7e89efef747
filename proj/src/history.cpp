#include "covreg/history.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace covreg {

const char* to_string(OpType op) {
  switch (op) {
    case OpType::cvr_write: return "cvr-write";
    case OpType::cvr_read: return "cvr-read";
    case OpType::rmw: return "rmw";
    case OpType::revise: return "revise";
    case OpType::get: return "get";
    case OpType::propose: return "propose";
  }
  return "?";
}

const char* to_string(EventKind k) {
  return k == EventKind::invoke ? "invoke" : "respond";
}

OpType op_from_string(const std::string& s) {
  if (s == "cvr-write") return OpType::cvr_write;
  if (s == "cvr-read") return OpType::cvr_read;
  if (s == "rmw") return OpType::rmw;
  if (s == "revise") return OpType::revise;
  if (s == "get") return OpType::get;
  if (s == "propose") return OpType::propose;
  throw MalformedHistory("unknown op: " + s);
}

nlohmann::json tag_to_json(const Tag& t) {
  return nlohmann::json::array({t.ts, t.wid});
}

Tag tag_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw MalformedHistory("bad tag encoding");
  return Tag{j[0].get<std::uint64_t>(), j[1].get<ProcessId>()};
}

std::string emit_history(const History& h) {
  std::string out;
  for (const auto& e : h) {
    out += std::to_string(e.seq);
    out += ' ';
    out += to_string(e.kind);
    out += ' ';
    out += std::to_string(e.proc);
    out += ' ';
    out += to_string(e.op);
    out += ' ';
    out += std::to_string(e.op_id);
    out += ' ';
    out += e.args.dump();
    out += ' ';
    out += e.kind == EventKind::respond ? e.result.dump() : std::string("-");
    out += '\n';
  }
  return out;
}

static HistoryEvent parse_line(const std::string& line, std::size_t lineno) {
  std::istringstream is(line);
  HistoryEvent e;
  std::string kind, op, args, result;
  if (!(is >> e.seq >> kind >> e.proc >> op >> e.op_id >> args >> result))
    throw MalformedHistory("line " + std::to_string(lineno) + ": bad record");
  if (kind == "invoke")
    e.kind = EventKind::invoke;
  else if (kind == "respond")
    e.kind = EventKind::respond;
  else
    throw MalformedHistory("line " + std::to_string(lineno) + ": bad kind");
  e.op = op_from_string(op);
  try {
    e.args = nlohmann::json::parse(args);
    e.result = e.kind == EventKind::respond ? nlohmann::json::parse(result)
                                            : nlohmann::json::object();
  } catch (const nlohmann::json::exception& ex) {
    throw MalformedHistory("line " + std::to_string(lineno) + ": " + ex.what());
  }
  if (e.kind == EventKind::invoke && result != "-")
    throw MalformedHistory("line " + std::to_string(lineno) + ": invoke carries a result");
  return e;
}

History parse_history(const std::string& text) {
  std::istringstream is(text);
  return parse_history_stream(is);
}

History parse_history_stream(std::istream& in) {
  History h;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    h.push_back(parse_line(line, lineno));
  }
  return h;
}

static bool register_level(OpType t) {
  return t == OpType::cvr_write || t == OpType::cvr_read;
}

std::vector<OpRecord> pair_operations(const History& h) {
  std::vector<OpRecord> ops;
  // op_id -> index into ops, for open operations
  std::map<std::uint64_t, std::size_t> open;
  // Application ops (rmw, revise, ...) nest register ops from the same
  // process, so alternation is tracked per (process, level).
  std::map<std::pair<ProcessId, bool>, std::uint64_t> in_flight;
  std::uint64_t last_seq = 0;
  bool first = true;
  for (const auto& e : h) {
    if (!first && e.seq <= last_seq)
      throw MalformedHistory("event seq not strictly increasing");
    first = false;
    last_seq = e.seq;
    auto key = std::make_pair(e.proc, register_level(e.op));
    if (e.kind == EventKind::invoke) {
      if (auto it = in_flight.find(key); it != in_flight.end())
        throw MalformedHistory("process " + std::to_string(e.proc) +
                               " invoked while an operation is in flight");
      OpRecord r;
      r.type = e.op;
      r.proc = e.proc;
      r.op_id = e.op_id;
      r.invoke_seq = e.seq;
      r.args = e.args;
      open[e.op_id] = ops.size();
      in_flight[key] = e.op_id;
      ops.push_back(std::move(r));
    } else {
      auto it = open.find(e.op_id);
      if (it == open.end())
        throw MalformedHistory("respond without matching invoke, op_id " +
                               std::to_string(e.op_id));
      OpRecord& r = ops[it->second];
      if (r.proc != e.proc || r.type != e.op)
        throw MalformedHistory("respond does not match invoke, op_id " +
                               std::to_string(e.op_id));
      r.respond_seq = e.seq;
      r.result = e.result;
      open.erase(it);
      in_flight.erase(key);
    }
  }
  return ops;
}

}  // namespace covreg
