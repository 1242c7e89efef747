#include "covreg/vmwabd.hpp"

#include <stdexcept>

#include "covreg/wire.hpp"

namespace covreg {
namespace abd {

std::vector<std::uint8_t> encode(const Message& m) {
  WireWriter w;
  w.u8(static_cast<std::uint8_t>(m.kind));
  w.u64(m.op_id);
  if (m.kind == MsgKind::query_reply || m.kind == MsgKind::propagate) {
    w.tag(m.tag);
    w.bytes(m.value);
  }
  return w.take();
}

Message decode(const std::vector<std::uint8_t>& buf) {
  WireReader r(buf);
  Message m;
  m.kind = static_cast<MsgKind>(r.u8());
  m.op_id = r.u64();
  if (m.kind == MsgKind::query_reply || m.kind == MsgKind::propagate) {
    m.tag = r.tag();
    m.value = r.bytes();
  }
  if (!r.done()) throw std::out_of_range("abd: trailing bytes");
  return m;
}

std::pair<Message, RegisterState> replica_handle(const Message& m, const RegisterState& st) {
  Message reply;
  reply.op_id = m.op_id;
  switch (m.kind) {
    case MsgKind::query:
      reply.kind = MsgKind::query_reply;
      reply.tag = st.tag;
      reply.value = st.value;
      return {reply, st};
    case MsgKind::propagate:
      reply.kind = MsgKind::ack;
      if (m.tag > st.tag) return {reply, RegisterState{m.value, m.tag}};
      return {reply, st};
    default:
      throw std::invalid_argument("abd: replica received a client-side message");
  }
}

void Replica::on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) {
  Message m = decode(payload);
  auto [reply, next] = replica_handle(m, st_);
  if (!(next.tag == st_.tag)) {
    st_ = std::move(next);
    tags_.push_back(st_.tag);
  }
  s.send(pid_, src, encode(reply));
}

Client::Client(ProcessId pid, std::vector<ProcessId> replicas)
    : pid_(pid), replicas_(std::move(replicas)) {
  if (pid_ == kReservedPid) throw std::invalid_argument("client id 0 is reserved");
  if (replicas_.empty()) throw std::invalid_argument("no replicas");
}

void Client::cvr_write(Sim& s, const Value& val, const Tag& ver, WriteCb done) {
  if (cur_) throw std::logic_error("client has an operation in flight");
  Pending p;
  p.op_id = s.next_op_id();
  p.is_write = true;
  p.val = val;
  p.ver = ver;
  p.wdone = std::move(done);
  cur_ = std::move(p);
  begin_query(s);
}

void Client::cvr_read(Sim& s, ReadCb done) {
  if (cur_) throw std::logic_error("client has an operation in flight");
  Pending p;
  p.op_id = s.next_op_id();
  p.rdone = std::move(done);
  cur_ = std::move(p);
  begin_query(s);
}

void Client::begin_query(Sim& s) {
  Message m;
  m.kind = MsgKind::query;
  m.op_id = cur_->op_id;
  auto bytes = encode(m);
  for (ProcessId r : replicas_) s.send(pid_, r, bytes);
}

void Client::begin_propagate(Sim& s) {
  cur_->in_query = false;
  Message m;
  m.kind = MsgKind::propagate;
  m.op_id = cur_->op_id;
  m.tag = cur_->out_tag;
  m.value = cur_->out_val;
  auto bytes = encode(m);
  for (ProcessId r : replicas_) s.send(pid_, r, bytes);
}

void Client::on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) {
  Message m = decode(payload);
  if (!cur_ || m.op_id != cur_->op_id) return;  // straggler from an earlier phase

  if (cur_->in_query) {
    if (m.kind != MsgKind::query_reply) return;
    cur_->replies.emplace(src, std::make_pair(m.tag, m.value));
    if (cur_->replies.size() < majority()) return;

    std::set<ProcessId> quorum;
    auto max_it = cur_->replies.begin();
    for (auto it = cur_->replies.begin(); it != cur_->replies.end(); ++it) {
      quorum.insert(it->first);
      if (it->second.first > max_it->second.first) max_it = it;
    }
    quorums_.push_back(std::move(quorum));
    const Tag& max_tag = max_it->second.first;
    const Value& max_val = max_it->second.second;

    if (cur_->is_write && cur_->ver == max_tag) {
      cur_->out_tag = tag_successor(max_tag, pid_);
      cur_->out_val = cur_->val;
      cur_->flag = WriteFlag::chg;
    } else {
      cur_->out_tag = max_tag;
      cur_->out_val = max_val;
      cur_->flag = WriteFlag::unchg;
    }
    begin_propagate(s);
    return;
  }

  if (m.kind != MsgKind::ack) return;
  cur_->acks.insert(src);
  if (cur_->acks.size() < majority()) return;
  quorums_.push_back(cur_->acks);

  Pending done = std::move(*cur_);
  cur_.reset();
  if (done.is_write)
    done.wdone(s, WriteOutcome{done.out_val, done.out_tag, done.flag});
  else
    done.rdone(s, done.out_val, done.out_tag);
}

}  // namespace abd
}  // namespace covreg
