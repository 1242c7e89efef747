#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "covreg/register_client.hpp"

namespace covreg {
namespace ldr {

enum class MsgKind : std::uint8_t {
  get_meta = 1,
  meta_reply = 2,
  put_meta = 3,
  meta_ack = 4,
  put = 5,
  put_ack = 6,
  get = 7,
  get_reply = 8,
};

struct Message {
  MsgKind kind = MsgKind::get_meta;
  std::uint64_t op_id = 0;
  Tag tag;                            // all but get_meta
  std::vector<ProcessId> locations;   // meta_reply / put_meta
  Value value;                        // put / get_reply
};

std::vector<std::uint8_t> encode(const Message& m);
Message decode(const std::vector<std::uint8_t>& buf);

/// Directory server: holds the highest (tag, locations) metadata. A
/// put-metadata is stored iff its tag is larger and it names at least f+1
/// locations; it is acked either way (clients wait on directory majorities).
class Directory : public Automaton {
 public:
  Directory(ProcessId pid, std::uint32_t f, std::vector<ProcessId> all_replicas);

  void on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) override;

  const Tag& tag() const { return tag_; }
  const std::vector<ProcessId>& locations() const { return locs_; }
  const std::vector<Tag>& tag_history() const { return tags_; }

 private:
  ProcessId pid_;
  std::uint32_t f_;
  Tag tag_;                         // bootstrap: TAG0 located at every replica
  std::vector<ProcessId> locs_;
  std::vector<Tag> tags_;
};

/// Replica server: append-only (tag, value) store. A get for an unknown tag
/// is ignored (no reply), exactly as specified.
class ReplicaServer : public Automaton {
 public:
  ReplicaServer(ProcessId pid, Value initial = {});

  void on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) override;

  const std::map<Tag, Value>& store() const { return store_; }

 private:
  ProcessId pid_;
  std::map<Tag, Value> store_;
};

struct FetchStats {
  std::uint64_t fetches = 0;    // get phases started
  std::uint64_t contacted = 0;  // replicas contacted across all get phases
  std::uint64_t replies = 0;    // first replies consumed
};

/// Client for the layered protocol: metadata via directory majorities, bulk
/// values via replica servers.
class Client : public RegisterClient {
 public:
  Client(ProcessId pid, std::uint32_t f, std::vector<ProcessId> directories,
         std::vector<ProcessId> replicas);

  void cvr_write(Sim& s, const Value& val, const Tag& ver, WriteCb done) override;
  void cvr_read(Sim& s, ReadCb done) override;
  void on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) override;

  const FetchStats& fetch_stats() const { return fetch_stats_; }

 private:
  enum class Phase { idle, get_meta, put, put_meta, writeback_meta, get_value };

  std::size_t dir_majority() const { return directories_.size() / 2 + 1; }
  void start_get_meta(Sim& s);
  void start_put(Sim& s);
  void start_put_meta(Sim& s, const Tag& t, const std::vector<ProcessId>& locs, Phase next);
  void start_get_value(Sim& s);
  void finish(Sim& s);

  ProcessId pid_;
  std::uint32_t f_;
  std::vector<ProcessId> directories_;
  std::vector<ProcessId> replicas_;

  Phase phase_ = Phase::idle;
  bool is_write_ = false;
  std::uint64_t op_id_ = 0;
  Value arg_val_;
  Tag arg_ver_;
  // Discovered metadata and outcome under construction.
  Tag meta_tag_;
  std::vector<ProcessId> meta_locs_;
  std::map<ProcessId, std::pair<Tag, std::vector<ProcessId>>> meta_replies_;
  std::set<ProcessId> acks_;
  Tag out_tag_;
  Value out_val_;
  WriteFlag flag_ = WriteFlag::unchg;
  bool got_value_ = false;
  WriteCb wdone_;
  ReadCb rdone_;
  FetchStats fetch_stats_;
};

}  // namespace ldr
}  // namespace covreg
