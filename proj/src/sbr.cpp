#include "sdnr/sbr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "sdnr/parallel.hpp"
#include "sdnr/trees.hpp"

namespace sdnr {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::vector<std::uint8_t> mask_with_open(const Network& net, std::span<const int> open_ids) {
  std::vector<std::uint8_t> mask(net.branch_count(), 1);
  for (int id : open_ids) {
    if (!net.has_branch(id)) throw ConfigurationMismatch("unknown branch id " + std::to_string(id));
    mask[net.branch_index(id)] = 0;
  }
  return mask;
}

StochasticSolution flow_solve(const Network& net, std::span<const std::uint8_t> mask, const ScenarioSet& scenarios,
                              const SolverConfig& conf, SolveStats& stats) {
  ++stats.flow_sopf;
  stats.opf_solves += scenarios.size();
  try {
    return solve_sopf_r(net, mask, scenarios, conf);
  } catch (const ScenarioFailure& e) {
    throw AlgorithmFailure(std::string("flow solve failed: ") + e.what());
  }
}

CandidateEvaluation evaluate(const Network& net, std::span<const int> open_ids, const ScenarioSet& scenarios,
                             const SolverConfig& conf, SolveStats& stats) {
  CandidateEvaluation ev;
  ++stats.candidate_sopf;
  stats.opf_solves += scenarios.size();
  try {
    const auto mask = mask_with_open(net, open_ids);
    const auto sol = solve_sopf_r(net, std::span<const std::uint8_t>(mask), scenarios, conf);
    ev.objective = sol.expected_objective;
    ev.expected_loss = sol.expected_loss;
    ev.feasible = true;
  } catch (const ScenarioFailure& e) {
    ev.failure = e.what();
  }
  return ev;
}

/// argmin of E[|p|] over a branch sequence; ties go to the lowest id.
int min_abs_flow(const Network& net, const std::vector<LoopBranch>& branches, std::span<const double> abs_flow) {
  int best = branches.front().branch;
  double best_v = abs_flow[net.branch_index(best)];
  for (const auto& lb : branches) {
    const double v = abs_flow[net.branch_index(lb.branch)];
    if (v < best_v || (v == best_v && lb.branch < best)) {
      best = lb.branch;
      best_v = v;
    }
  }
  return best;
}

int argmax_bus(const std::map<int, double>& injection) {
  int best = injection.begin()->first;
  for (const auto& [bus, v] : injection) {
    if (v > injection.at(best)) best = bus;  // map order gives lowest id on ties
  }
  return best;
}

std::string describe_trace(const std::vector<CandidateEvaluation>& trace) {
  std::ostringstream os;
  for (const auto& ev : trace) os << " [branch " << ev.branch << ": " << ev.failure << "]";
  return os.str();
}

bool better(double obj, int id, double best_obj, int best_id) {
  return obj < best_obj || (obj == best_obj && id < best_id);
}

OneStageResult single_loop(const Network& net, std::span<const int> base_open, const ScenarioSet& scenarios,
                           const SolverConfig& conf, bool divide) {
  const auto t0 = Clock::now();
  OneStageResult r;
  const auto mask = mask_with_open(net, base_open);
  const auto loops = fundamental_loops(net, mask);
  if (loops.size() != 1) {
    throw ArgumentError("single-loop search needs exactly one loop, found " + std::to_string(loops.size()));
  }
  r.loop = loops.front();
  const auto sol = flow_solve(net, mask, scenarios, conf, r.stats);
  r.loop_injection = loop_injections(net, sol, r.loop);

  if (divide) {
    for (std::size_t k = 0; k + 1 < r.loop.buses().size(); ++k) {
      const int bus = r.loop.buses()[k];
      if (r.loop_injection.at(bus) > 0.0) r.injecting_buses.push_back(bus);
    }
  }
  if (r.injecting_buses.empty()) r.injecting_buses.push_back(argmax_bus(r.loop_injection));
  r.subpaths = divide_into_subpaths(r.loop, r.injecting_buses);

  std::vector<CandidateEvaluation> candidates;
  for (std::size_t m = 0; m < r.subpaths.size(); ++m) {
    const int e_hat = min_abs_flow(net, r.subpaths[m].branches, sol.expected_abs_flow);
    r.subpath_minimum.push_back(e_hat);
    for (const auto& [id, why] : candidate_set(net, r.subpaths[m], e_hat, sol.expected_flow)) {
      const bool seen = std::any_of(candidates.begin(), candidates.end(),
                                    [id = id](const CandidateEvaluation& c) { return c.branch == id; });
      if (seen) continue;
      CandidateEvaluation ev;
      ev.branch = id;
      ev.subpath = m;
      ev.reason = why;
      candidates.push_back(ev);
    }
  }

  std::vector<int> open_ids(base_open.begin(), base_open.end());
  open_ids.push_back(0);
  int best = -1;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    open_ids.back() = candidates[k].branch;
    auto ev = evaluate(net, open_ids, scenarios, conf, r.stats);
    candidates[k].objective = ev.objective;
    candidates[k].expected_loss = ev.expected_loss;
    candidates[k].feasible = ev.feasible;
    candidates[k].failure = std::move(ev.failure);
    if (candidates[k].feasible &&
        (best < 0 || better(candidates[k].objective, candidates[k].branch, candidates[static_cast<std::size_t>(best)].objective,
                            candidates[static_cast<std::size_t>(best)].branch))) {
      best = static_cast<int>(k);
    }
  }
  r.trace = std::move(candidates);
  if (best < 0) throw AlgorithmFailure("every candidate opening failed:" + describe_trace(r.trace));

  const auto& win = r.trace[static_cast<std::size_t>(best)];
  r.opened = win.branch;
  r.objective = win.objective;
  r.expected_loss = win.expected_loss;
  open_ids.back() = win.branch;
  r.config = SwitchConfiguration::with_open(net, open_ids);
  r.stats.wall_ms = elapsed_ms(t0);
  return r;
}

struct StageOne {
  StochasticSolution flows;
  std::vector<int> opened;
  std::vector<Loop> loops;
};

StageOne greedy_openings(const Network& net, const ScenarioSet& scenarios, const SolverConfig& conf,
                         SolveStats& stats) {
  StageOne s;
  const std::vector<std::uint8_t> all(net.branch_count(), 1);
  s.flows = flow_solve(net, all, scenarios, conf, stats);
  auto pending = find_loops(net);
  while (!pending.empty()) {
    const Loop current = pending.front();
    const int e = min_abs_flow(net, current.branches(), s.flows.expected_abs_flow);
    s.opened.push_back(e);
    s.loops.push_back(current);
    pending = update_loop_after_opening(net, pending, e).loops;
  }
  return s;
}

ReconfigurationResult already_radial(const Network& net, const ScenarioSet& scenarios, const SolverConfig& conf) {
  ReconfigurationResult r;
  r.config = SwitchConfiguration::all_closed(net);
  const std::vector<int> none;
  auto ev = evaluate(net, none, scenarios, conf, r.stats);
  if (!ev.feasible) throw AlgorithmFailure("the radial network itself failed: " + ev.failure);
  r.objective = ev.objective;
  r.expected_loss = ev.expected_loss;
  r.notes.push_back("network is already radial; nothing to open");
  return r;
}

}  // namespace

std::string_view reason_name(CandidateReason r) {
  switch (r) {
    case CandidateReason::min_flow: return "min-flow";
    case CandidateReason::downstream: return "downstream";
    case CandidateReason::upstream: return "upstream";
  }
  return "?";
}

SolveStats& SolveStats::operator+=(const SolveStats& o) {
  flow_sopf += o.flow_sopf;
  candidate_sopf += o.candidate_sopf;
  opf_solves += o.opf_solves;
  trees_enumerated += o.trees_enumerated;
  trees_skipped += o.trees_skipped;
  return *this;
}

std::vector<std::pair<int, CandidateReason>> candidate_set(const Network& net, const SubPath& path, int e,
                                                           std::span<const double> expected_flow) {
  const auto& br = path.branches;
  const auto it = std::find_if(br.begin(), br.end(), [e](const LoopBranch& lb) { return lb.branch == e; });
  if (it == br.end()) throw ArgumentError("branch " + std::to_string(e) + " is not on the path");
  const auto pos = static_cast<std::size_t>(it - br.begin());
  const double along = it->orientation * expected_flow[net.branch_index(e)];

  std::vector<std::pair<int, CandidateReason>> out{{e, CandidateReason::min_flow}};
  if (along > 0.0 && pos + 1 < br.size()) out.emplace_back(br[pos + 1].branch, CandidateReason::downstream);
  if (along < 0.0 && pos > 0) out.emplace_back(br[pos - 1].branch, CandidateReason::upstream);
  return out;
}

OneStageResult one_stage_sbr(const Network& net, std::span<const int> base_open, const ScenarioSet& scenarios,
                             const SolverConfig& conf) {
  return single_loop(net, base_open, scenarios, conf, true);
}

OneStageResult baseline_one_stage(const Network& net, std::span<const int> base_open,
                                  const ScenarioSet& scenarios, const SolverConfig& conf) {
  return single_loop(net, base_open, scenarios, conf, false);
}

ReconfigurationResult to_result(const OneStageResult& one) {
  ReconfigurationResult r;
  r.config = one.config;
  r.opened = one.config.open_branches();
  r.objective = one.objective;
  r.expected_loss = one.expected_loss;
  r.trace = one.trace;
  r.stats = one.stats;
  r.stats.wall_ms = one.stats.wall_ms;
  return r;
}

ReconfigurationResult two_stage_sbr(const Network& net, const ScenarioSet& scenarios, const SolverConfig& conf) {
  const auto t0 = Clock::now();
  if (net.redundant_branch_count() == 0) {
    auto r = already_radial(net, scenarios, conf);
    r.stats.wall_ms = elapsed_ms(t0);
    return r;
  }
  ReconfigurationResult r;
  auto stage1 = greedy_openings(net, scenarios, conf, r.stats);
  r.stage1_open = stage1.opened;
  r.stage1_loops = stage1.loops;

  bool any = false;
  for (std::size_t l = 0; l < stage1.opened.size(); ++l) {
    std::vector<int> base;
    for (std::size_t k = 0; k < stage1.opened.size(); ++k) {
      if (k != l) base.push_back(stage1.opened[k]);
    }
    OneStageResult one;
    try {
      one = one_stage_sbr(net, base, scenarios, conf);
    } catch (const AlgorithmFailure& e) {
      r.notes.push_back("iteration " + std::to_string(l) + " failed: " + e.what());
      one.config = SwitchConfiguration::with_open(net, base);
    }
    for (auto ev : one.trace) {
      ev.stage = 2;
      ev.iteration = static_cast<int>(l);
      r.trace.push_back(std::move(ev));
    }
    r.stats += one.stats;
    if (std::isfinite(one.objective) && (!any || one.objective < r.stage2[r.best_iteration].objective)) {
      r.best_iteration = l;
      any = true;
    }
    r.stage2.push_back(std::move(one));
  }
  if (!any) throw AlgorithmFailure("every close-and-open iteration failed");

  const auto& win = r.stage2[r.best_iteration];
  r.config = win.config;
  r.opened = win.config.open_branches();
  r.objective = win.objective;
  r.expected_loss = win.expected_loss;
  r.stats.wall_ms = elapsed_ms(t0);
  return r;
}

ReconfigurationResult baseline_two_stage(const Network& net, const ScenarioSet& scenarios, const SolverConfig& conf) {
  const auto t0 = Clock::now();
  if (net.redundant_branch_count() == 0) {
    auto r = already_radial(net, scenarios, conf);
    r.stats.wall_ms = elapsed_ms(t0);
    return r;
  }
  ReconfigurationResult r;
  auto stage1 = greedy_openings(net, scenarios, conf, r.stats);
  r.stage1_open = stage1.opened;
  r.stage1_loops = stage1.loops;

  std::map<std::vector<int>, CandidateEvaluation> cache;
  auto open = stage1.opened;
  CandidateEvaluation current;
  for (std::size_t l = 0; l < stage1.opened.size(); ++l) {
    const int e_l = open[l];
    const Loop& loop = stage1.loops[l];
    const auto injection = loop_injections(net, stage1.flows, loop);
    const auto path = divide_into_subpaths(loop, std::vector<int>{argmax_bus(injection)}).front();
    const int e_hat = stage1.opened[l];

    int best_branch = -1;
    CandidateEvaluation best;
    for (const auto& [c, why] : candidate_set(net, path, e_hat, stage1.flows.expected_flow)) {
      auto trial = open;
      trial[l] = c;
      if (!is_radial(net, SwitchConfiguration::with_open(net, trial))) continue;
      auto key = trial;
      std::sort(key.begin(), key.end());
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, evaluate(net, trial, scenarios, conf, r.stats)).first;
      CandidateEvaluation ev = it->second;
      ev.branch = c;
      ev.reason = why;
      ev.stage = 1;
      ev.iteration = static_cast<int>(l);
      r.trace.push_back(ev);
      if (ev.feasible && (best_branch < 0 || better(ev.objective, c, best.objective, best_branch))) {
        best_branch = c;
        best = ev;
      }
    }
    if (best_branch >= 0) {
      open[l] = best_branch;
      current = best;
    } else {
      r.notes.push_back("loop " + std::to_string(l) + ": no feasible candidate, keeping branch " +
                        std::to_string(e_l));
    }
  }
  if (!current.feasible) throw AlgorithmFailure("baseline found no feasible configuration:" + describe_trace(r.trace));
  r.config = SwitchConfiguration::with_open(net, open);
  r.opened = r.config.open_branches();
  r.objective = current.objective;
  r.expected_loss = current.expected_loss;
  r.stats.wall_ms = elapsed_ms(t0);
  return r;
}

ReconfigurationResult exhaustive_oracle(const Network& net, const ScenarioSet& scenarios, const SolverConfig& conf,
                                        std::uint64_t budget) {
  const auto t0 = Clock::now();
  ReconfigurationResult r;
  const BigCount count = count_spanning_trees(net);
  r.stats.tree_count = count.str();
  if (count > budget) {
    throw BudgetExceeded(count.str(), "radial configuration count " + count.str() + " exceeds the budget of " +
                                          std::to_string(budget));
  }
  std::vector<std::vector<std::uint8_t>> trees;
  trees.reserve(static_cast<std::size_t>(count));
  r.stats.trees_enumerated = enumerate_spanning_trees(
      net, [&](std::span<const std::uint8_t> mask) { trees.emplace_back(mask.begin(), mask.end()); });

  SolverConfig inner = conf;
  inner.jobs = 1;
  std::vector<double> objective(trees.size(), std::numeric_limits<double>::infinity());
  std::vector<double> loss(trees.size(), std::numeric_limits<double>::infinity());
  parallel_for(trees.size(), conf.jobs, [&](std::size_t t) {
    try {
      const auto sol = solve_sopf_r(net, std::span<const std::uint8_t>(trees[t]), scenarios, inner);
      objective[t] = sol.expected_objective;
      loss[t] = sol.expected_loss;
    } catch (const ScenarioFailure&) {
    }
  });
  r.stats.candidate_sopf = trees.size();
  r.stats.opf_solves = trees.size() * scenarios.size();

  std::size_t best = trees.size();
  for (std::size_t t = 0; t < trees.size(); ++t) {
    if (!std::isfinite(objective[t])) {
      ++r.stats.trees_skipped;
      continue;
    }
    if (best == trees.size() || objective[t] < objective[best]) best = t;
  }
  if (best == trees.size()) throw AlgorithmFailure("every radial configuration failed");

  std::vector<int> open_ids;
  for (std::size_t e = 0; e < net.branch_count(); ++e) {
    if (!trees[best][e]) open_ids.push_back(net.branches()[e].id);
  }
  r.config = SwitchConfiguration::with_open(net, open_ids);
  r.opened = open_ids;
  r.objective = objective[best];
  r.expected_loss = loss[best];
  CandidateEvaluation ev;
  ev.branch = open_ids.empty() ? 0 : open_ids.front();
  ev.objective = r.objective;
  ev.expected_loss = r.expected_loss;
  ev.feasible = true;
  r.trace.push_back(ev);
  r.stats.wall_ms = elapsed_ms(t0);
  return r;
}

}  // namespace sdnr
