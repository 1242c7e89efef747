#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covreg/apps.hpp"
#include "covreg/checker.hpp"
#include "covreg/ranked.hpp"
#include "covreg/scenario.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitPropertyFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

covreg::History load_history(const std::string& path) {
  if (path == "-") return covreg::parse_history_stream(std::cin);
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  return covreg::parse_history_stream(in);
}

void print_verdict(const covreg::Verdict& v) {
  if (v.pass) {
    std::cout << "PASS " << v.property << "\n";
    return;
  }
  std::cout << "FAIL " << v.property << ": " << v.detail << "\n";
  if (!v.counterexample.empty()) {
    std::cout << "counterexample:\n";
    std::istringstream lines(covreg::emit_history(v.counterexample));
    std::string line;
    while (std::getline(lines, line)) std::cout << "  " << line << "\n";
  }
}

int cmd_sim(const covreg::ScenarioConfig& cfg, const std::string& out_path) {
  covreg::RunResult run = covreg::run_scenario(cfg);
  if (!run.incomplete.empty()) {
    std::cerr << "simulation did not quiesce; pending clients:";
    for (covreg::ProcessId p : run.incomplete) std::cerr << ' ' << p;
    std::cerr << "\n";
    return kExitPropertyFail;
  }
  std::string text = covreg::emit_history(run.history);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return kExitPass;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return kExitIo;
  }
  out << text;
  return kExitPass;
}

int cmd_check(const std::string& path, std::vector<std::string> props, bool oracle) {
  covreg::History h = load_history(path);
  if (props.empty())
    props = {"atomicity", "validity", "consolidation", "continuity", "evolution"};
  bool all_pass = true;
  for (const auto& p : props) {
    covreg::Verdict v = covreg::check_property(p, h);
    print_verdict(v);
    all_pass = all_pass && v.pass;
  }
  if (oracle) {
    covreg::Verdict v = covreg::brute_force_linearizable(h);
    print_verdict(v);
    all_pass = all_pass && v.pass;
  }
  return all_pass ? kExitPass : kExitPropertyFail;
}

int demo_rmw(std::uint32_t contend, std::uint64_t seed) {
  covreg::RunResult run = covreg::run_rmw_contention(contend, 3, 5, seed);
  auto records = covreg::pair_operations(run.history);
  for (const auto& r : records) {
    if (r.type != covreg::OpType::rmw || !r.complete()) continue;
    std::cout << "rmw by process " << r.proc << ": "
              << r.result.at("status").get<std::string>()
              << " value=" << r.result.at("val").get<std::string>() << "\n";
  }
  covreg::Verdict v = covreg::check_rmw_history(run.history);
  print_verdict(v);
  for (const auto& pv : covreg::check_all(run.history)) print_verdict(pv);
  return v.pass ? kExitPass : kExitPropertyFail;
}

int demo_file(std::uint64_t seed) {
  covreg::FileRunResult res = covreg::run_file_contention(2, 5, seed, 4);
  for (const auto& [pid, n] : res.retries)
    std::cout << "writer " << pid << ": " << n << " rebase retries, "
              << "applied=" << (std::find(res.unapplied.begin(), res.unapplied.end(), pid) ==
                                        res.unapplied.end()
                                    ? "yes"
                                    : "no")
              << "\n";
  bool ok = res.unapplied.empty();
  for (const auto& pv : covreg::check_all(res.run.history)) {
    print_verdict(pv);
    ok = ok && pv.pass;
  }
  return ok ? kExitPass : kExitPropertyFail;
}

int demo_consensus(std::uint32_t procs, std::uint64_t seed) {
  covreg::ConsensusResult res = covreg::run_consensus(procs, seed);
  bool agree = true;
  const covreg::Value* first = nullptr;
  for (const auto& [pid, val] : res.decided) {
    std::cout << "process " << pid << " decided: " << covreg::to_hex(val) << "\n";
    if (!first)
      first = &val;
    else
      agree = agree && (*first == val);
  }
  std::cout << (agree ? "agreement reached" : "AGREEMENT VIOLATED") << "\n";
  return agree && res.decided.size() == procs ? kExitPass : kExitPropertyFail;
}

int demo_ranked() {
  using namespace covreg;
  // The permissive schedule the impossibility argument leans on: a write
  // with a lower rank still commits after a higher-rank commit.
  std::vector<RankedOp> schedule = {
      {true, 5, Value{'a'}},
      {true, 2, Value{'b'}},
      {false, 7, {}},
  };
  std::vector<RankedStep> steps;
  std::string err = run_ranked_schedule(RankedPolicy::permissive, Value{'0'}, schedule, &steps);
  for (const auto& st : steps) {
    if (st.op.is_write)
      std::cout << "rr-write(rank=" << st.op.rank << ") -> "
                << (st.committed ? "commit" : "abort") << " observed=" << st.observed << "\n";
    else
      std::cout << "rr-read(rank=" << st.op.rank << ") -> (" << st.out_rank << ", "
                << to_hex(st.out_val) << ")\n";
  }
  if (!err.empty()) {
    std::cout << "FAIL: " << err << "\n";
    return kExitPropertyFail;
  }
  bool lower_commit = steps[1].committed && steps[1].op.rank < steps[0].op.rank;
  std::cout << (lower_commit ? "lower-rank write committed after a higher-rank commit"
                             : "UNEXPECTED: lower-rank write did not commit")
            << "\n";
  return lower_commit ? kExitPass : kExitPropertyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coverable register toolkit"};
  app.require_subcommand(1);

  // sim
  auto* sim = app.add_subcommand("sim", "run a simulation and emit its history");
  std::string protocol = "vmwabd";
  covreg::ScenarioConfig cfg;
  std::string out_path;
  std::int64_t delay_bound = -1;
  sim->add_option("--protocol", protocol, "vmwabd | ldr | strongtr");
  sim->add_option("--replicas", cfg.sim.replicas, "replica count");
  sim->add_option("--writers", cfg.sim.writers, "writer clients");
  sim->add_option("--readers", cfg.sim.readers, "reader clients");
  sim->add_option("--ops", cfg.sim.ops_per_client, "operations per client");
  sim->add_option("--crashes", cfg.sim.crashes, "replica crashes to inject");
  sim->add_option("--seed", cfg.sim.seed, "schedule seed");
  sim->add_option("--delay-bound", delay_bound, "max reordering window (unset: asynchronous)");
  sim->add_option("--f", cfg.ldr_f, "ldr tolerance parameter");
  sim->add_option("--directories", cfg.directories, "ldr directory servers");
  sim->add_option("--out", out_path, "output file (default stdout)");

  // check
  auto* check = app.add_subcommand("check", "verify properties of a history file");
  std::string history_path;
  std::vector<std::string> props;
  bool oracle = false;
  check->add_option("history", history_path, "history file, or - for stdin")->required();
  check->add_option("--props", props,
                    "properties to check: atomicity validity consolidation continuity "
                    "evolution strong");
  check->add_flag("--oracle", oracle, "also run the brute-force oracle (small histories)");

  // demo
  auto* demo = app.add_subcommand("demo", "run a canonical scenario");
  std::string which;
  std::uint32_t contend = 2;
  std::uint32_t procs = 5;
  std::uint64_t demo_seed = 1;
  demo->add_option("which", which, "rmw | file | consensus | ranked")->required();
  demo->add_option("--contend", contend, "concurrent rmw clients");
  demo->add_option("--procs", procs, "consensus proposers");
  demo->add_option("--seed", demo_seed, "schedule seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (sim->parsed()) {
      cfg.protocol = covreg::protocol_from_string(protocol);
      if (delay_bound >= 0) cfg.sim.delay_bound = static_cast<std::uint64_t>(delay_bound);
      return cmd_sim(cfg, out_path);
    }
    if (check->parsed()) return cmd_check(history_path, props, oracle);
    if (demo->parsed()) {
      if (which == "rmw") return demo_rmw(contend, demo_seed);
      if (which == "file") return demo_file(demo_seed);
      if (which == "consensus") return demo_consensus(procs, demo_seed);
      if (which == "ranked") return demo_ranked();
      std::cerr << "unknown demo: " << which << "\n";
      return kExitConfig;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const covreg::MalformedHistory& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}
