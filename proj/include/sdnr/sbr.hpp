#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sdnr/distflow.hpp"
#include "sdnr/netgraph.hpp"
#include "sdnr/network.hpp"
#include "sdnr/scenarios.hpp"

namespace sdnr {

enum class CandidateReason { min_flow, downstream, upstream };

std::string_view reason_name(CandidateReason r);

/// One SOPF-R evaluation of a candidate opening.
struct CandidateEvaluation {
  int branch = 0;
  double objective = std::numeric_limits<double>::infinity();  // expected substation supply
  double expected_loss = std::numeric_limits<double>::infinity();
  std::size_t subpath = 0;
  CandidateReason reason = CandidateReason::min_flow;
  bool feasible = false;
  std::string failure;  // reason when infeasible or diverged
  int stage = 0;        // 0 single loop, 1/2 stages of the two-stage search
  int iteration = 0;    // 0-based outer iteration that produced it
};

struct SolveStats {
  std::size_t flow_sopf = 0;       // SOPF-R solves used to read expected flows
  std::size_t candidate_sopf = 0;  // SOPF-R solves of candidate openings
  std::size_t opf_solves = 0;      // single-scenario solves behind the two above
  std::uint64_t trees_enumerated = 0;
  std::uint64_t trees_skipped = 0;  // oracle trees that were infeasible or diverged
  std::string tree_count;           // matrix-tree count (oracle only)
  double wall_ms = 0.0;

  std::size_t sopf_total() const { return flow_sopf + candidate_sopf; }
  SolveStats& operator+=(const SolveStats& o);
};

/// Outcome of a single-loop search (improved one-stage or its baseline).
struct OneStageResult {
  int opened = 0;
  double objective = std::numeric_limits<double>::infinity();
  double expected_loss = std::numeric_limits<double>::infinity();
  SwitchConfiguration config;
  Loop loop;
  std::map<int, double> loop_injection;  // expected injection into the loop per bus
  std::vector<int> injecting_buses;
  std::vector<SubPath> subpaths;
  std::vector<int> subpath_minimum;  // min expected |p| branch per sub-path
  std::vector<CandidateEvaluation> trace;
  SolveStats stats;
};

struct ReconfigurationResult {
  SwitchConfiguration config;
  std::vector<int> opened;  // ascending
  double objective = std::numeric_limits<double>::infinity();
  double expected_loss = std::numeric_limits<double>::infinity();
  std::vector<CandidateEvaluation> trace;
  SolveStats stats;
  std::vector<std::string> notes;

  // Two-stage details.
  std::vector<int> stage1_open;  // e_l^o in the order they were opened
  std::vector<Loop> stage1_loops;  // loop each e_l^o was chosen from
  std::vector<OneStageResult> stage2;
  std::size_t best_iteration = 0;
};

/// Candidate set on a path: `e` plus its neighbour in the direction of the
/// expected flow, once that flow is re-signed onto the traversal. Neighbours
/// outside `path` do not exist. `expected_flow` is indexed by branch index.
std::vector<std::pair<int, CandidateReason>> candidate_set(const Network& net, const SubPath& path, int e,
                                                           std::span<const double> expected_flow);

/// Improved one-stage search on the single loop left when every branch except
/// `base_open` is closed.
OneStageResult one_stage_sbr(const Network& net, std::span<const int> base_open, const ScenarioSet& scenarios,
                             const SolverConfig& conf = {});

/// Same search with the loop treated as one path (no sub-path division).
OneStageResult baseline_one_stage(const Network& net, std::span<const int> base_open,
                                  const ScenarioSet& scenarios, const SolverConfig& conf = {});

/// Greedy stage-1 openings followed by a close-and-open pass over them.
ReconfigurationResult two_stage_sbr(const Network& net, const ScenarioSet& scenarios, const SolverConfig& conf = {});

/// Greedy stage-1 openings refined loop by loop within the fixed topology.
ReconfigurationResult baseline_two_stage(const Network& net, const ScenarioSet& scenarios,
                                         const SolverConfig& conf = {});

/// Global minimum over every radial configuration. Throws BudgetExceeded
/// when the matrix-tree count exceeds `budget`.
ReconfigurationResult exhaustive_oracle(const Network& net, const ScenarioSet& scenarios, const SolverConfig& conf = {},
                                        std::uint64_t budget = 100000);

/// Wraps a one-stage result as a full reconfiguration result.
ReconfigurationResult to_result(const OneStageResult& r);

}  // namespace sdnr
