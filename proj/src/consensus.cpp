#include "covreg/consensus.hpp"

#include <stdexcept>

namespace covreg {

std::optional<Proposal> ConsensusOracle::propose(const Tag& instance,
                                                 const std::optional<Proposal>& p) {
  auto it = decided_.find(instance);
  if (it != decided_.end()) return it->second;
  if (!p) return std::nullopt;
  decided_.emplace(instance, *p);
  return *p;
}

Tag generate_version(const Tag& ver, ProcessId proc) { return tag_successor(ver, proc); }

StrongClient::StrongClient(ProcessId pid, std::shared_ptr<ConsensusOracle> oracle,
                           Value initial)
    : pid_(pid), oracle_(std::move(oracle)), lcval_(std::move(initial)) {
  if (pid_ == kReservedPid) throw std::invalid_argument("client id 0 is reserved");
  if (!oracle_) throw std::invalid_argument("no oracle");
}

void StrongClient::arm(Sim& s) { s.send(pid_, pid_, {}); }

void StrongClient::cvr_write(Sim& s, const Value& val, const Tag& ver, WriteCb done) {
  if (phase_ != Phase::idle) throw std::logic_error("client has an operation in flight");
  in_write_ = true;
  arg_val_ = val;
  arg_ver_ = ver;
  wdone_ = std::move(done);
  phase_ = Phase::write_propose;
  arm(s);
}

void StrongClient::cvr_read(Sim& s, ReadCb done) {
  if (phase_ != Phase::idle) throw std::logic_error("client has an operation in flight");
  in_write_ = false;
  rdone_ = std::move(done);
  phase_ = Phase::read_probe;
  arm(s);
}

void StrongClient::finish_unchg(Sim& s) {
  phase_ = Phase::idle;
  auto done = std::move(wdone_);
  done(s, WriteOutcome{lcval_, lcver_, WriteFlag::unchg});
}

void StrongClient::on_message(Sim& s, ProcessId, const std::vector<std::uint8_t>&) {
  switch (phase_) {
    case Phase::idle:
      return;  // stale step
    case Phase::write_propose: {
      ver_new_ = generate_version(arg_ver_, pid_);
      auto p = oracle_->propose(arg_ver_, Proposal{arg_val_, ver_new_});
      if (p->ver == ver_new_) {
        lcval_ = p->val;
        lcver_ = p->ver;
        phase_ = Phase::idle;
        auto done = std::move(wdone_);
        done(s, WriteOutcome{lcval_, lcver_, WriteFlag::chg});
        return;
      }
      lcval_ = p->val;
      lcver_ = p->ver;
      phase_ = Phase::chase;
      arm(s);
      return;
    }
    case Phase::chase: {
      auto p = oracle_->propose(lcver_, std::nullopt);
      if (!p) {
        finish_unchg(s);
        return;
      }
      lcval_ = p->val;
      lcver_ = p->ver;
      arm(s);
      return;
    }
    case Phase::read_probe: {
      auto p = oracle_->propose(lcver_, std::nullopt);
      if (!p) {
        phase_ = Phase::idle;
        auto done = std::move(rdone_);
        done(s, lcval_, lcver_);
        return;
      }
      lcval_ = p->val;
      lcver_ = p->ver;
      arm(s);
      return;
    }
  }
}

}  // namespace covreg
