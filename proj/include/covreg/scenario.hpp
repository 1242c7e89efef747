#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "covreg/ldr.hpp"
#include "covreg/register_client.hpp"
#include "covreg/simnet.hpp"

namespace covreg {

enum class Protocol { vmwabd, ldr, strongtr };

const char* to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

struct ScenarioConfig {
  Protocol protocol = Protocol::vmwabd;
  SimConfig sim;
  std::uint32_t ldr_f = 1;        // ldr only; sim.replicas should be >= 2f+1
  std::uint32_t directories = 5;  // ldr only
  Value initial;                  // v_0

  void validate() const;
};

struct RunResult {
  History history;
  /// Tag sequence per server process (replicas, or directories for ldr).
  std::map<ProcessId, std::vector<Tag>> server_tags;
  /// Reply quorums recorded by vmwabd clients, per completed phase.
  std::vector<std::set<ProcessId>> quorums;
  SimStats stats;
  ldr::FetchStats fetch;
  /// Clients whose workload did not finish (deadlock or crash fallout).
  std::vector<ProcessId> incomplete;
};

/// Random read/write workload under the chosen protocol: writers issue
/// ops_per_client writes (revising the latest tag they observed), readers
/// issue ops_per_client reads. Fully deterministic in the config.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Round-based rmw contention: `clients` processes each run `rounds` rmw
/// operations; within a round every participant finishes its read before any
/// write starts, so each round is one contention group.
RunResult run_rmw_contention(std::uint32_t clients, std::uint32_t rounds,
                             std::uint32_t replicas, std::uint64_t seed);

/// The five two-client rmw interleavings: 1 write1-before-read2,
/// 2 write2-before-read1, 3 read2 < write1 < write2, 4 mirrored,
/// 5 concurrent writes. Returns the run plus each client's rmw status.
struct RmwCaseResult {
  RunResult run;
  bool success1 = false;
  bool success2 = false;
};
RmwCaseResult run_rmw_case(int which, std::uint32_t replicas, std::uint64_t seed);

/// Consensus over the strongly coverable register on the local oracle.
struct ConsensusResult {
  RunResult run;
  std::map<ProcessId, Value> proposed;
  std::map<ProcessId, Value> decided;
};
ConsensusResult run_consensus(std::uint32_t procs, std::uint64_t seed);

/// File writers doing get / revise with rebase-and-retry until OK.
struct FileRunResult {
  RunResult run;
  std::map<ProcessId, std::uint32_t> retries;
  std::vector<ProcessId> unapplied;  // writers that never got an OK
};
FileRunResult run_file_contention(std::uint32_t writers, std::uint32_t replicas,
                                  std::uint64_t seed, std::uint64_t delay_bound,
                                  std::uint32_t max_retries = 64);

}  // namespace covreg
