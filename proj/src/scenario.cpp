#include "covreg/scenario.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "covreg/apps.hpp"
#include "covreg/consensus.hpp"
#include "covreg/vmwabd.hpp"

namespace covreg {

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::vmwabd: return "vmwabd";
    case Protocol::ldr: return "ldr";
    case Protocol::strongtr: return "strongtr";
  }
  return "?";
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "vmwabd") return Protocol::vmwabd;
  if (s == "ldr") return Protocol::ldr;
  if (s == "strongtr") return Protocol::strongtr;
  throw std::invalid_argument("unknown protocol: " + s);
}

void ScenarioConfig::validate() const {
  sim.validate();
  if (protocol == Protocol::ldr) {
    if (directories == 0) throw std::invalid_argument("ldr needs directory servers");
    if (sim.replicas < 2 * ldr_f + 1)
      throw std::invalid_argument("ldr needs at least 2f+1 replica servers");
    if (sim.crashes > ldr_f)
      throw std::invalid_argument("ldr crash budget is f");
  }
  if (protocol == Protocol::strongtr && sim.crashes > 0)
    throw std::invalid_argument("the local-oracle register has no crashable servers");
}

namespace {

class ClientProcess : public Automaton {
 public:
  ClientProcess(ProcessId pid, std::unique_ptr<RegisterClient> reg)
      : pid_(pid), reg_(std::move(reg)) {}

  void on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& p) override {
    reg_->on_message(s, src, p);
  }
  bool done() const { return done_; }
  ProcessId pid() const { return pid_; }
  RegisterClient* reg() const { return reg_.get(); }

 protected:
  void logged_write(Sim& s, const Value& val, const Tag& ver,
                    std::function<void(Sim&, const WriteOutcome&)> k) {
    std::uint64_t id = s.next_op_id();
    s.log_invoke(pid_, OpType::cvr_write, id,
                 {{"val", to_hex(val)}, {"ver", tag_to_json(ver)}});
    reg_->cvr_write(s, val, ver,
                    [this, id, k = std::move(k)](Sim& s2, const WriteOutcome& out) {
                      s2.log_respond(pid_, OpType::cvr_write, id,
                                     {{"val", to_hex(out.value)},
                                      {"tag", tag_to_json(out.tag)},
                                      {"flag", out.changed() ? "chg" : "unchg"}});
                      k(s2, out);
                    });
  }

  void logged_read(Sim& s, std::function<void(Sim&, const Value&, const Tag&)> k) {
    std::uint64_t id = s.next_op_id();
    s.log_invoke(pid_, OpType::cvr_read, id, nlohmann::json::object());
    reg_->cvr_read(s, [this, id, k = std::move(k)](Sim& s2, const Value& v, const Tag& t) {
      s2.log_respond(pid_, OpType::cvr_read, id,
                     {{"val", to_hex(v)}, {"tag", tag_to_json(t)}});
      k(s2, v, t);
    });
  }

  ProcessId pid_;
  std::unique_ptr<RegisterClient> reg_;
  bool done_ = false;
};

class RandomClient : public ClientProcess {
 public:
  RandomClient(ProcessId pid, std::unique_ptr<RegisterClient> reg, bool writer,
               std::uint32_t ops)
      : ClientProcess(pid, std::move(reg)), writer_(writer), ops_(ops) {}

  void start(Sim& s) override { step(s); }

 private:
  void step(Sim& s) {
    if (idx_ == ops_) {
      done_ = true;
      return;
    }
    std::uint32_t i = idx_++;
    if (writer_) {
      Value v{static_cast<std::uint8_t>(pid_), static_cast<std::uint8_t>(i)};
      logged_write(s, v, observed_, [this](Sim& s2, const WriteOutcome& out) {
        observed_ = out.tag;
        step(s2);
      });
    } else {
      logged_read(s, [this](Sim& s2, const Value&, const Tag& t) {
        observed_ = t;
        step(s2);
      });
    }
  }

  bool writer_;
  std::uint32_t ops_;
  std::uint32_t idx_ = 0;
  Tag observed_ = kTag0;  // latest tag this client saw; writes revise it
};

/// Counting barrier on top of one-shot gates.
struct RoundBoard {
  std::uint32_t participants = 0;
  GateBoard gates;
  std::map<std::string, std::uint32_t> counts;

  void arrive(const std::string& key, Sim& s) {
    if (++counts[key] == participants) gates.open(key, s);
  }
};

class RmwRoundClient : public ClientProcess {
 public:
  RmwRoundClient(ProcessId pid, std::unique_ptr<RegisterClient> reg, RoundBoard* board,
                 std::uint32_t rounds)
      : ClientProcess(pid, std::move(reg)), board_(board), rounds_(rounds) {}

  void start(Sim& s) override { round(s, 0); }

 private:
  void round(Sim& s, std::uint32_t r) {
    if (r == rounds_) {
      done_ = true;
      return;
    }
    std::uint64_t id = s.next_op_id();
    s.log_invoke(pid_, OpType::rmw, id, {{"f", "append-pid"}});
    logged_read(s, [this, r, id](Sim& s2, const Value& v, const Tag& t) {
      Value newv = append_pid(v, pid_);
      // Hold every write until all participants finished reading, so the
      // round forms a single contention group on one version.
      board_->arrive("reads" + std::to_string(r), s2);
      board_->gates.when_open(
          {"reads" + std::to_string(r)}, s2, [this, r, id, newv, t](Sim& s3) {
            logged_write(s3, newv, t, [this, r, id](Sim& s4, const WriteOutcome& out) {
              s4.log_respond(pid_, OpType::rmw, id,
                             {{"val", to_hex(out.value)},
                              {"status", out.changed() ? "success" : "fail"}});
              board_->arrive("done" + std::to_string(r), s4);
              board_->gates.when_open({"done" + std::to_string(r)}, s4,
                                      [this, r](Sim& s5) { round(s5, r + 1); });
            });
          });
    });
  }

  RoundBoard* board_;
  std::uint32_t rounds_;
};

struct RmwScript {
  std::vector<std::string> before_read;
  std::string after_read;
  std::vector<std::string> before_write;
  std::string after_write;
};

class ScriptedRmwClient : public ClientProcess {
 public:
  ScriptedRmwClient(ProcessId pid, std::unique_ptr<RegisterClient> reg, GateBoard* gates,
                    RmwScript script)
      : ClientProcess(pid, std::move(reg)), gates_(gates), script_(std::move(script)) {}

  void start(Sim& s) override {
    gates_->when_open(script_.before_read, s, [this](Sim& s2) { begin(s2); });
  }

  bool success() const { return success_; }

 private:
  void begin(Sim& s) {
    std::uint64_t id = s.next_op_id();
    s.log_invoke(pid_, OpType::rmw, id, {{"f", "append-pid"}});
    logged_read(s, [this, id](Sim& s2, const Value& v, const Tag& t) {
      if (!script_.after_read.empty()) gates_->open(script_.after_read, s2);
      Value newv = append_pid(v, pid_);
      gates_->when_open(script_.before_write, s2, [this, id, newv, t](Sim& s3) {
        logged_write(s3, newv, t, [this, id](Sim& s4, const WriteOutcome& out) {
          success_ = out.changed();
          s4.log_respond(pid_, OpType::rmw, id,
                         {{"val", to_hex(out.value)},
                          {"status", out.changed() ? "success" : "fail"}});
          done_ = true;
          if (!script_.after_write.empty()) gates_->open(script_.after_write, s4);
        });
      });
    });
  }

  GateBoard* gates_;
  RmwScript script_;
  bool success_ = false;
};

class ProposerClient : public ClientProcess {
 public:
  ProposerClient(ProcessId pid, std::unique_ptr<RegisterClient> reg, Value proposal,
                 std::map<ProcessId, Value>* decided)
      : ClientProcess(pid, std::move(reg)), proposal_(std::move(proposal)),
        decided_(decided) {}

  void start(Sim& s) override {
    std::uint64_t id = s.next_op_id();
    s.log_invoke(pid_, OpType::propose, id, {{"val", to_hex(proposal_)}});
    logged_write(s, proposal_, kTag0, [this, id](Sim& s2, const WriteOutcome& out) {
      (*decided_)[pid_] = out.value;
      s2.log_respond(pid_, OpType::propose, id, {{"val", to_hex(out.value)}});
      done_ = true;
    });
  }

 private:
  Value proposal_;
  std::map<ProcessId, Value>* decided_;
};

class FileWriterClient : public ClientProcess {
 public:
  FileWriterClient(ProcessId pid, std::unique_ptr<RegisterClient> reg,
                   std::uint32_t max_retries)
      : ClientProcess(pid, std::move(reg)), max_retries_(max_retries) {}

  void start(Sim& s) override {
    std::uint64_t id = s.next_op_id();
    s.log_invoke(pid_, OpType::get, id, nlohmann::json::object());
    logged_read(s, [this, id](Sim& s2, const Value& v, const Tag& t) {
      s2.log_respond(pid_, OpType::get, id,
                     {{"val", to_hex(v)}, {"tag", tag_to_json(t)}});
      attempt(s2, v, t);
    });
  }

  std::uint32_t retries() const { return retries_; }
  bool applied() const { return applied_; }

 private:
  void attempt(Sim& s, const Value& base, const Tag& ver) {
    Value newv = append_pid(base, pid_);
    std::uint64_t id = s.next_op_id();
    s.log_invoke(pid_, OpType::revise, id,
                 {{"val", to_hex(newv)}, {"ver", tag_to_json(ver)}});
    logged_write(s, newv, ver, [this, id](Sim& s2, const WriteOutcome& out) {
      if (out.changed()) {
        s2.log_respond(pid_, OpType::revise, id, {{"ok", true}});
        applied_ = true;
        done_ = true;
        return;
      }
      s2.log_respond(pid_, OpType::revise, id,
                     {{"ok", false},
                      {"val", to_hex(out.value)},
                      {"tag", tag_to_json(out.tag)}});
      if (++retries_ > max_retries_) {
        done_ = true;  // give up; reported as unapplied
        return;
      }
      attempt(s2, out.value, out.tag);
    });
  }

  std::uint32_t max_retries_;
  std::uint32_t retries_ = 0;
  bool applied_ = false;
};

/// Everything a deployed simulation owns.
struct Fleet {
  Sim sim;
  std::vector<std::unique_ptr<Automaton>> servers;
  std::vector<std::unique_ptr<ClientProcess>> clients;
  std::vector<abd::Replica*> abd_replicas;
  std::vector<ldr::Directory*> directories;
  std::vector<ProcessId> crashable;  // replica pids eligible for crashes
  std::vector<ProcessId> replica_pids;
  std::vector<ProcessId> dir_pids;
  std::shared_ptr<ConsensusOracle> oracle;
  Value initial;
  std::uint32_t ldr_f = 0;

  explicit Fleet(const ScenarioConfig& cfg)
      : sim(cfg.sim.seed, cfg.sim.delay_bound), initial(cfg.initial), ldr_f(cfg.ldr_f) {}

  std::unique_ptr<RegisterClient> make_register(Protocol p, ProcessId pid) {
    switch (p) {
      case Protocol::vmwabd:
        return std::make_unique<abd::Client>(pid, replica_pids);
      case Protocol::ldr:
        return std::make_unique<ldr::Client>(pid, ldr_f, dir_pids, replica_pids);
      case Protocol::strongtr:
        return std::make_unique<StrongClient>(pid, oracle, initial);
    }
    throw std::logic_error("unreachable");
  }
};

// Servers occupy pids above the client range.
void deploy_servers(Fleet& f, const ScenarioConfig& cfg, ProcessId first_server) {
  ProcessId next = first_server;
  switch (cfg.protocol) {
    case Protocol::vmwabd:
      for (std::uint32_t i = 0; i < cfg.sim.replicas; ++i, ++next) {
        auto r = std::make_unique<abd::Replica>(next, cfg.initial);
        f.abd_replicas.push_back(r.get());
        f.replica_pids.push_back(next);
        f.sim.add_process(next, r.get());
        f.servers.push_back(std::move(r));
      }
      f.crashable = f.replica_pids;
      return;
    case Protocol::ldr:
      for (std::uint32_t i = 0; i < cfg.directories; ++i, ++next) f.dir_pids.push_back(next);
      for (std::uint32_t i = 0; i < cfg.sim.replicas; ++i)
        f.replica_pids.push_back(next + i);
      for (ProcessId d : f.dir_pids) {
        auto dir = std::make_unique<ldr::Directory>(d, cfg.ldr_f, f.replica_pids);
        f.directories.push_back(dir.get());
        f.sim.add_process(d, dir.get());
        f.servers.push_back(std::move(dir));
      }
      for (ProcessId r : f.replica_pids) {
        auto rep = std::make_unique<ldr::ReplicaServer>(r, cfg.initial);
        f.sim.add_process(r, rep.get());
        f.servers.push_back(std::move(rep));
      }
      f.crashable = f.replica_pids;
      return;
    case Protocol::strongtr:
      f.oracle = std::make_shared<ConsensusOracle>();
      return;
  }
}

void schedule_crashes(Fleet& f, const ScenarioConfig& cfg) {
  if (cfg.sim.crashes == 0 || f.crashable.empty()) return;
  // Victim choice is seeded independently of event priorities.
  std::mt19937_64 rng(cfg.sim.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<ProcessId> victims = f.crashable;
  std::shuffle(victims.begin(), victims.end(), rng);
  for (std::uint32_t i = 0; i < cfg.sim.crashes && i < victims.size(); ++i)
    f.sim.schedule_crash(victims[i]);
}

RunResult collect(Fleet& f) {
  RunResult out;
  out.history = f.sim.history();
  out.stats = f.sim.stats;
  for (std::size_t i = 0; i < f.abd_replicas.size(); ++i)
    out.server_tags[f.replica_pids[i]] = f.abd_replicas[i]->tag_history();
  for (std::size_t i = 0; i < f.directories.size(); ++i)
    out.server_tags[f.dir_pids[i]] = f.directories[i]->tag_history();
  for (const auto& c : f.clients) {
    if (!c->done()) out.incomplete.push_back(c->pid());
    if (auto* a = dynamic_cast<abd::Client*>(c->reg()))
      out.quorums.insert(out.quorums.end(), a->quorums().begin(), a->quorums().end());
    if (auto* l = dynamic_cast<ldr::Client*>(c->reg())) {
      out.fetch.fetches += l->fetch_stats().fetches;
      out.fetch.contacted += l->fetch_stats().contacted;
      out.fetch.replies += l->fetch_stats().replies;
    }
  }
  return out;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Fleet f(cfg);
  std::uint32_t nclients = cfg.sim.writers + cfg.sim.readers;
  deploy_servers(f, cfg, nclients + 1);
  for (std::uint32_t i = 0; i < nclients; ++i) {
    ProcessId pid = i + 1;
    bool writer = i < cfg.sim.writers;
    auto c = std::make_unique<RandomClient>(pid, f.make_register(cfg.protocol, pid), writer,
                                            cfg.sim.ops_per_client);
    f.sim.add_process(pid, c.get());
    f.clients.push_back(std::move(c));
  }
  schedule_crashes(f, cfg);
  f.sim.run();
  return collect(f);
}

RunResult run_rmw_contention(std::uint32_t clients, std::uint32_t rounds,
                             std::uint32_t replicas, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.sim.seed = seed;
  cfg.sim.replicas = replicas;
  cfg.sim.writers = clients;
  cfg.sim.ops_per_client = rounds;
  cfg.validate();
  Fleet f(cfg);
  deploy_servers(f, cfg, clients + 1);
  RoundBoard board;
  board.participants = clients;
  for (std::uint32_t i = 0; i < clients; ++i) {
    ProcessId pid = i + 1;
    auto c = std::make_unique<RmwRoundClient>(pid, f.make_register(cfg.protocol, pid),
                                              &board, rounds);
    f.sim.add_process(pid, c.get());
    f.clients.push_back(std::move(c));
  }
  f.sim.run();
  return collect(f);
}

RmwCaseResult run_rmw_case(int which, std::uint32_t replicas, std::uint64_t seed) {
  RmwScript s1, s2;
  switch (which) {
    case 1:  // pi1 runs to completion before pi2 starts
      s1.after_write = "w1";
      s2.before_read = {"w1"};
      break;
    case 2:
      s2.after_write = "w2";
      s1.before_read = {"w2"};
      break;
    case 3:  // read2 < write1 < write2, both rmw concurrent
      s2.after_read = "r2";
      s1.before_write = {"r2"};
      s1.after_write = "w1";
      s2.before_write = {"w1"};
      break;
    case 4:
      s1.after_read = "r1";
      s2.before_write = {"r1"};
      s2.after_write = "w2";
      s1.before_write = {"w2"};
      break;
    case 5:  // concurrent writes over a common read frontier
      s1.after_read = "r1";
      s2.after_read = "r2";
      s1.before_write = {"r1", "r2"};
      s2.before_write = {"r1", "r2"};
      break;
    default:
      throw std::invalid_argument("rmw case must be 1..5");
  }

  ScenarioConfig cfg;
  cfg.sim.seed = seed;
  cfg.sim.replicas = replicas;
  cfg.sim.writers = 2;
  cfg.validate();
  Fleet f(cfg);
  deploy_servers(f, cfg, 3);
  GateBoard gates;
  auto c1 = std::make_unique<ScriptedRmwClient>(1, f.make_register(cfg.protocol, 1), &gates,
                                                std::move(s1));
  auto c2 = std::make_unique<ScriptedRmwClient>(2, f.make_register(cfg.protocol, 2), &gates,
                                                std::move(s2));
  auto* p1 = c1.get();
  auto* p2 = c2.get();
  f.sim.add_process(1, p1);
  f.sim.add_process(2, p2);
  f.clients.push_back(std::move(c1));
  f.clients.push_back(std::move(c2));
  f.sim.run();

  RmwCaseResult out;
  out.success1 = p1->success();
  out.success2 = p2->success();
  out.run = collect(f);
  return out;
}

ConsensusResult run_consensus(std::uint32_t procs, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.protocol = Protocol::strongtr;
  cfg.sim.seed = seed;
  cfg.sim.writers = procs;
  cfg.validate();
  Fleet f(cfg);
  deploy_servers(f, cfg, procs + 1);

  ConsensusResult out;
  for (std::uint32_t i = 0; i < procs; ++i) {
    ProcessId pid = i + 1;
    Value proposal{static_cast<std::uint8_t>('a' + (i % 26))};
    out.proposed[pid] = proposal;
    auto c = std::make_unique<ProposerClient>(pid, f.make_register(cfg.protocol, pid),
                                              proposal, &out.decided);
    f.sim.add_process(pid, c.get());
    f.clients.push_back(std::move(c));
  }
  f.sim.run();
  out.run = collect(f);
  return out;
}

FileRunResult run_file_contention(std::uint32_t writers, std::uint32_t replicas,
                                  std::uint64_t seed, std::uint64_t delay_bound,
                                  std::uint32_t max_retries) {
  ScenarioConfig cfg;
  cfg.sim.seed = seed;
  cfg.sim.replicas = replicas;
  cfg.sim.writers = writers;
  cfg.sim.delay_bound = delay_bound;
  cfg.validate();
  Fleet f(cfg);
  deploy_servers(f, cfg, writers + 1);

  std::vector<FileWriterClient*> ws;
  for (std::uint32_t i = 0; i < writers; ++i) {
    ProcessId pid = i + 1;
    auto c = std::make_unique<FileWriterClient>(pid, f.make_register(cfg.protocol, pid),
                                                max_retries);
    ws.push_back(c.get());
    f.sim.add_process(pid, c.get());
    f.clients.push_back(std::move(c));
  }
  f.sim.run();

  FileRunResult out;
  out.run = collect(f);
  for (FileWriterClient* w : ws) {
    out.retries[w->pid()] = w->retries();
    if (!w->applied()) out.unapplied.push_back(w->pid());
  }
  return out;
}

}  // namespace covreg
