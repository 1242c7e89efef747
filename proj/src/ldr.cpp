#include "covreg/ldr.hpp"

#include <algorithm>
#include <stdexcept>

#include "covreg/wire.hpp"

namespace covreg {
namespace ldr {

std::vector<std::uint8_t> encode(const Message& m) {
  WireWriter w;
  w.u8(static_cast<std::uint8_t>(m.kind));
  w.u64(m.op_id);
  if (m.kind != MsgKind::get_meta) w.tag(m.tag);
  if (m.kind == MsgKind::meta_reply || m.kind == MsgKind::put_meta) {
    w.u32(static_cast<std::uint32_t>(m.locations.size()));
    for (ProcessId p : m.locations) w.u32(p);
  }
  if (m.kind == MsgKind::put || m.kind == MsgKind::get_reply) w.bytes(m.value);
  return w.take();
}

Message decode(const std::vector<std::uint8_t>& buf) {
  WireReader r(buf);
  Message m;
  m.kind = static_cast<MsgKind>(r.u8());
  m.op_id = r.u64();
  if (m.kind != MsgKind::get_meta) m.tag = r.tag();
  if (m.kind == MsgKind::meta_reply || m.kind == MsgKind::put_meta) {
    std::uint32_t n = r.u32();
    m.locations.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) m.locations.push_back(r.u32());
  }
  if (m.kind == MsgKind::put || m.kind == MsgKind::get_reply) m.value = r.bytes();
  if (!r.done()) throw std::out_of_range("ldr: trailing bytes");
  return m;
}

Directory::Directory(ProcessId pid, std::uint32_t f, std::vector<ProcessId> all_replicas)
    : pid_(pid), f_(f), tag_(kTag0), locs_(std::move(all_replicas)), tags_{kTag0} {}

void Directory::on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) {
  Message m = decode(payload);
  switch (m.kind) {
    case MsgKind::get_meta: {
      Message reply;
      reply.kind = MsgKind::meta_reply;
      reply.op_id = m.op_id;
      reply.tag = tag_;
      reply.locations = locs_;
      s.send(pid_, src, encode(reply));
      return;
    }
    case MsgKind::put_meta: {
      if (m.tag > tag_ && m.locations.size() >= f_ + 1) {
        tag_ = m.tag;
        locs_ = m.locations;
        tags_.push_back(tag_);
      }
      Message reply;
      reply.kind = MsgKind::meta_ack;
      reply.op_id = m.op_id;
      reply.tag = m.tag;
      s.send(pid_, src, encode(reply));
      return;
    }
    default:
      throw std::invalid_argument("ldr: directory received a non-metadata message");
  }
}

ReplicaServer::ReplicaServer(ProcessId pid, Value initial) : pid_(pid) {
  store_.emplace(kTag0, std::move(initial));
}

void ReplicaServer::on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) {
  Message m = decode(payload);
  switch (m.kind) {
    case MsgKind::put: {
      store_.emplace(m.tag, m.value);
      Message reply;
      reply.kind = MsgKind::put_ack;
      reply.op_id = m.op_id;
      reply.tag = m.tag;
      s.send(pid_, src, encode(reply));
      return;
    }
    case MsgKind::get: {
      auto it = store_.find(m.tag);
      if (it == store_.end()) return;  // unknown tag: ignore
      Message reply;
      reply.kind = MsgKind::get_reply;
      reply.op_id = m.op_id;
      reply.tag = m.tag;
      reply.value = it->second;
      s.send(pid_, src, encode(reply));
      return;
    }
    default:
      throw std::invalid_argument("ldr: replica server received a metadata message");
  }
}

Client::Client(ProcessId pid, std::uint32_t f, std::vector<ProcessId> directories,
               std::vector<ProcessId> replicas)
    : pid_(pid), f_(f), directories_(std::move(directories)), replicas_(std::move(replicas)) {
  if (pid_ == kReservedPid) throw std::invalid_argument("client id 0 is reserved");
  if (replicas_.size() < 2 * f_ + 1)
    throw std::invalid_argument("need at least 2f+1 replica servers");
}

void Client::cvr_write(Sim& s, const Value& val, const Tag& ver, WriteCb done) {
  if (phase_ != Phase::idle) throw std::logic_error("client has an operation in flight");
  is_write_ = true;
  arg_val_ = val;
  arg_ver_ = ver;
  wdone_ = std::move(done);
  start_get_meta(s);
}

void Client::cvr_read(Sim& s, ReadCb done) {
  if (phase_ != Phase::idle) throw std::logic_error("client has an operation in flight");
  is_write_ = false;
  rdone_ = std::move(done);
  start_get_meta(s);
}

void Client::start_get_meta(Sim& s) {
  phase_ = Phase::get_meta;
  op_id_ = s.next_op_id();
  meta_replies_.clear();
  Message m;
  m.kind = MsgKind::get_meta;
  m.op_id = op_id_;
  auto bytes = encode(m);
  for (ProcessId d : directories_) s.send(pid_, d, bytes);
}

void Client::start_put(Sim& s) {
  phase_ = Phase::put;
  acks_.clear();
  out_tag_ = tag_successor(meta_tag_, pid_);
  out_val_ = arg_val_;
  flag_ = WriteFlag::chg;
  Message m;
  m.kind = MsgKind::put;
  m.op_id = op_id_;
  m.tag = out_tag_;
  m.value = out_val_;
  auto bytes = encode(m);
  for (std::size_t i = 0; i < 2 * f_ + 1 && i < replicas_.size(); ++i)
    s.send(pid_, replicas_[i], bytes);
}

void Client::start_put_meta(Sim& s, const Tag& t, const std::vector<ProcessId>& locs,
                            Phase next) {
  phase_ = next;
  acks_.clear();
  Message m;
  m.kind = MsgKind::put_meta;
  m.op_id = op_id_;
  m.tag = t;
  m.locations = locs;
  auto bytes = encode(m);
  for (ProcessId d : directories_) s.send(pid_, d, bytes);
}

void Client::start_get_value(Sim& s) {
  phase_ = Phase::get_value;
  got_value_ = false;
  ++fetch_stats_.fetches;
  Message m;
  m.kind = MsgKind::get;
  m.op_id = op_id_;
  m.tag = meta_tag_;
  auto bytes = encode(m);
  std::size_t n = 0;
  for (ProcessId r : meta_locs_) {
    if (n == f_ + 1) break;
    s.send(pid_, r, bytes);
    ++n;
    ++fetch_stats_.contacted;
  }
}

void Client::finish(Sim& s) {
  phase_ = Phase::idle;
  if (is_write_) {
    auto done = std::move(wdone_);
    done(s, WriteOutcome{out_val_, out_tag_, flag_});
  } else {
    auto done = std::move(rdone_);
    done(s, out_val_, out_tag_);
  }
}

void Client::on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) {
  Message m = decode(payload);
  if (m.op_id != op_id_ || phase_ == Phase::idle) return;  // straggler

  switch (phase_) {
    case Phase::get_meta: {
      if (m.kind != MsgKind::meta_reply) return;
      meta_replies_.emplace(src, std::make_pair(m.tag, m.locations));
      if (meta_replies_.size() < dir_majority()) return;
      auto max_it = meta_replies_.begin();
      for (auto it = meta_replies_.begin(); it != meta_replies_.end(); ++it)
        if (it->second.first > max_it->second.first) max_it = it;
      meta_tag_ = max_it->second.first;
      meta_locs_ = max_it->second.second;
      if (is_write_ && arg_ver_ == meta_tag_) {
        start_put(s);
      } else {
        // Write-back the discovered metadata, then fetch the bulk value.
        out_tag_ = meta_tag_;
        flag_ = WriteFlag::unchg;
        start_put_meta(s, meta_tag_, meta_locs_, Phase::writeback_meta);
      }
      return;
    }
    case Phase::put: {
      if (m.kind != MsgKind::put_ack) return;
      acks_.insert(src);
      if (acks_.size() < f_ + 1) return;
      std::vector<ProcessId> s_new(acks_.begin(), acks_.end());
      start_put_meta(s, out_tag_, s_new, Phase::put_meta);
      return;
    }
    case Phase::put_meta: {
      if (m.kind != MsgKind::meta_ack) return;
      acks_.insert(src);
      if (acks_.size() < dir_majority()) return;
      finish(s);
      return;
    }
    case Phase::writeback_meta: {
      if (m.kind != MsgKind::meta_ack) return;
      acks_.insert(src);
      if (acks_.size() < dir_majority()) return;
      start_get_value(s);
      return;
    }
    case Phase::get_value: {
      if (m.kind != MsgKind::get_reply || got_value_) return;
      got_value_ = true;
      ++fetch_stats_.replies;
      out_val_ = m.value;
      out_tag_ = m.tag;
      finish(s);
      return;
    }
    case Phase::idle:
      return;
  }
}

}  // namespace ldr
}  // namespace covreg
