#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sdnr/error.hpp"
#include "sdnr/netgraph.hpp"
#include "sdnr/network.hpp"
#include "sdnr/scenarios.hpp"

namespace sdnr {

enum class LimitMode { check_only, reject };
enum class FlowMethod { automatic, sweep, newton };

struct SolverConfig {
  double tolerance = 1e-8;  // max equation residual at convergence (per-unit)
  int max_iterations = 100;
  double big_m = 10.0;  // per-unit squared; must cover v_max^2 - v_min^2
  LimitMode limits = LimitMode::check_only;
  /// `automatic`: backward/forward sweep on radial configurations, Newton otherwise.
  FlowMethod method = FlowMethod::automatic;
  std::size_t jobs = 1;  // concurrent scenario solves
};

struct LimitViolation {
  std::string constraint;  // e.g. "voltage", "branch-current", "substation-p"
  int element = 0;         // bus or branch id
  double value = 0.0;
  double limit = 0.0;
};

/// Branch-flow solution of one scenario. Bus arrays are indexed by dense bus
/// index, branch arrays by dense branch index; open branches carry zeros.
struct PowerFlowSolution {
  std::vector<double> v;  // squared voltage magnitude
  std::vector<double> p;  // sending-end active flow along the reference direction
  std::vector<double> q;
  std::vector<double> l;  // squared current magnitude
  std::vector<double> p_injection;  // net injection per bus; substation entry is p_s
  std::vector<double> q_injection;
  std::vector<std::uint8_t> closed;
  double p_substation = 0.0;
  double q_substation = 0.0;
  double objective = 0.0;  // = p_substation
  double loss = 0.0;       // sum r * l
  double max_residual = 0.0;
  int iterations = 0;
  FlowMethod method = FlowMethod::sweep;
  std::vector<LimitViolation> violations;
};

struct StochasticSolution {
  std::vector<PowerFlowSolution> scenarios;
  std::vector<double> probabilities;
  double expected_objective = 0.0;
  double expected_loss = 0.0;
  std::vector<double> expected_flow;      // E[p] per branch index
  std::vector<double> expected_abs_flow;  // E[|p|] per branch index
};

/// Raised by solve_sopf_r when any scenario fails.
class ScenarioFailure : public Error {
 public:
  ScenarioFailure(std::vector<std::size_t> failed, std::vector<std::string> reasons, bool infeasible);
  const std::vector<std::size_t>& failed() const { return failed_; }
  const std::vector<std::string>& reasons() const { return reasons_; }
  /// True when every failure was a limit violation in reject mode.
  bool infeasible() const { return infeasible_; }

 private:
  std::vector<std::size_t> failed_;
  std::vector<std::string> reasons_;
  bool infeasible_;
};

PowerFlowSolution solve_opf_r(const Network& net, const SwitchConfiguration& cfg, const Scenario& scenario,
                              const SolverConfig& conf = {});
PowerFlowSolution solve_opf_r(const Network& net, std::span<const std::uint8_t> closed, const Scenario& scenario,
                              const SolverConfig& conf = {});

StochasticSolution solve_sopf_r(const Network& net, const SwitchConfiguration& cfg, const ScenarioSet& scenarios,
                                const SolverConfig& conf = {});
StochasticSolution solve_sopf_r(const Network& net, std::span<const std::uint8_t> closed,
                                const ScenarioSet& scenarios, const SolverConfig& conf = {});

/// Expected active power each loop bus injects into the loop, keyed by bus id.
std::map<int, double> loop_injections(const Network& net, const StochasticSolution& sol, const Loop& loop);

struct SocResidual {
  std::vector<double> per_branch;  // |l v_from - p^2 - q^2|, zero on open branches
  double max = 0.0;
};

SocResidual soc_exactness_residual(const Network& net, const PowerFlowSolution& sol);

/// Largest active/reactive nodal balance residual over all buses.
double power_balance_residual(const Network& net, const PowerFlowSolution& sol);

/// |p_s - (sum of net demand + sum r l)|, the feeder-wide active balance.
double network_balance_residual(const PowerFlowSolution& sol);

}  // namespace sdnr
