#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "covreg/register_client.hpp"

namespace covreg {
namespace abd {

enum class MsgKind : std::uint8_t { query = 1, query_reply = 2, propagate = 3, ack = 4 };

struct Message {
  MsgKind kind = MsgKind::query;
  std::uint64_t op_id = 0;
  Tag tag;      // query_reply / propagate
  Value value;  // query_reply / propagate
};

std::vector<std::uint8_t> encode(const Message& m);
Message decode(const std::vector<std::uint8_t>& buf);

/// The replica transition: queries report the local pair unchanged;
/// a propagated pair is adopted iff its tag is strictly larger; every
/// propagate is acked.
std::pair<Message, RegisterState> replica_handle(const Message& m, const RegisterState& st);

class Replica : public Automaton {
 public:
  explicit Replica(ProcessId pid, Value initial = {})
      : pid_(pid), st_{std::move(initial), kTag0}, tags_{kTag0} {}

  void on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) override;

  const RegisterState& state() const { return st_; }
  /// Every tag this replica ever held, in adoption order.
  const std::vector<Tag>& tag_history() const { return tags_; }

 private:
  ProcessId pid_;
  RegisterState st_;
  std::vector<Tag> tags_;
};

/// Two-phase quorum client. Both operations query all replicas, act on the
/// first majority of replies, then propagate the resulting pair to all
/// replicas and finish on a majority of acks. An unsuccessful write still
/// propagates (it is a write-back, not a no-op).
class Client : public RegisterClient {
 public:
  Client(ProcessId pid, std::vector<ProcessId> replicas);

  void cvr_write(Sim& s, const Value& val, const Tag& ver, WriteCb done) override;
  void cvr_read(Sim& s, ReadCb done) override;
  void on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) override;

  /// Replica sets that answered each completed phase, for quorum-overlap
  /// assertions.
  const std::vector<std::set<ProcessId>>& quorums() const { return quorums_; }

 private:
  struct Pending {
    std::uint64_t op_id = 0;
    bool is_write = false;
    bool in_query = true;
    Value val;  // write argument
    Tag ver;    // write argument
    std::map<ProcessId, std::pair<Tag, Value>> replies;
    std::set<ProcessId> acks;
    Value out_val;
    Tag out_tag;
    WriteFlag flag = WriteFlag::unchg;
    WriteCb wdone;
    ReadCb rdone;
  };

  std::size_t majority() const { return replicas_.size() / 2 + 1; }
  void begin_query(Sim& s);
  void begin_propagate(Sim& s);

  ProcessId pid_;
  std::vector<ProcessId> replicas_;
  std::optional<Pending> cur_;
  std::vector<std::set<ProcessId>> quorums_;
};

}  // namespace abd
}  // namespace covreg
