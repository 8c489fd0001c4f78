#include "sdnr/distflow.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "sdnr/kernels.hpp"
#include "sdnr/parallel.hpp"

namespace sdnr {

namespace {

struct Rooted {
  std::vector<std::size_t> order;  // BFS order from the substation
  std::vector<std::ptrdiff_t> parent_branch;
  std::vector<std::size_t> parent;
};

Rooted root_closed_graph(const Network& net, std::span<const std::uint8_t> closed) {
  const std::size_t n = net.bus_count();
  Rooted t;
  t.parent_branch.assign(n, -1);
  t.parent.assign(n, n);
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{net.substation_index()};
  seen[net.substation_index()] = true;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    t.order.push_back(u);
    for (std::size_t e : net.incident(u)) {
      if (!closed[e]) continue;
      const std::size_t w = net.bus_index(net.branches()[e].other(net.buses()[u].id));
      if (seen[w]) continue;
      seen[w] = true;
      t.parent[w] = u;
      t.parent_branch[w] = static_cast<std::ptrdiff_t>(e);
      queue.push_back(w);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) {
      throw TopologyError("bus " + std::to_string(net.buses()[i].id) + " is islanded from the substation");
    }
  }
  return t;
}

void check_config(const Network& net, const SolverConfig& conf) {
  if (!(conf.tolerance > 0.0)) throw ArgumentError("solver tolerance must be positive");
  if (conf.max_iterations < 1) throw ArgumentError("max_iterations must be positive");
  for (const auto& b : net.buses()) {
    if (conf.big_m < b.v_max * b.v_max - b.v_min * b.v_min) {
      throw ArgumentError("big-M must be at least v_max^2 - v_min^2");
    }
  }
}

std::vector<double> net_injection(const Scenario& s, std::size_t n, bool active) {
  if (s.p_load.size() != n) throw ArgumentError("scenario does not match the network bus count");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = active ? s.p_net(i) : s.q_net(i);
  return out;
}

/// Backward/forward sweep on a radial configuration.
void sweep(const Network& net, std::span<const std::uint8_t> closed, const Rooted& tree, const SolverConfig& conf,
           PowerFlowSolution& sol) {
  const std::size_t n = net.bus_count();
  const std::size_t root = net.substation_index();
  const auto branches = net.branches();
  // Flows measured at the parent end, parent -> child, stored per child bus.
  std::vector<double> P(n, 0.0), Q(n, 0.0), L(n, 0.0);
  std::vector<double> down_p(n), down_q(n);
  std::vector<double> res(n, 0.0);

  for (int it = 1; it <= conf.max_iterations; ++it) {
    sol.iterations = it;
    std::fill(down_p.begin(), down_p.end(), 0.0);
    std::fill(down_q.begin(), down_q.end(), 0.0);
    for (auto k = tree.order.rbegin(); k != tree.order.rend(); ++k) {
      const std::size_t c = *k;
      if (c == root) continue;
      const auto& br = branches[static_cast<std::size_t>(tree.parent_branch[c])];
      const double dp = down_p[c] - sol.p_injection[c];
      const double dq = down_q[c] - sol.q_injection[c];
      const double vu = sol.v[tree.parent[c]];
      // Low-loss root of (r^2 + x^2) l^2 + (2 (r dp + x dq) - v_u) l + dp^2 + dq^2 = 0.
      const double a = br.r * br.r + br.x * br.x;
      const double b = 2.0 * (br.r * dp + br.x * dq) - vu;
      const double cc = dp * dp + dq * dq;
      const double disc = b * b - 4.0 * a * cc;
      if (disc < 0.0 || b >= 0.0) {
        if (cc == 0.0) {
          L[c] = 0.0;
        } else {
          throw DivergenceError("no physical branch-flow solution on branch " + std::to_string(br.id) +
                                " (voltage collapse)");
        }
      } else {
        L[c] = 2.0 * cc / (-b + std::sqrt(disc));
      }
      P[c] = dp + br.r * L[c];
      Q[c] = dq + br.x * L[c];
      down_p[tree.parent[c]] += P[c];
      down_q[tree.parent[c]] += Q[c];
    }
    for (std::size_t c : tree.order) {
      if (c == root) continue;
      const auto& br = branches[static_cast<std::size_t>(tree.parent_branch[c])];
      sol.v[c] = sol.v[tree.parent[c]] - 2.0 * (br.r * P[c] + br.x * Q[c]) + (br.r * br.r + br.x * br.x) * L[c];
      if (!(sol.v[c] > 0.0)) throw DivergenceError("non-positive voltage during sweep");
    }
    for (std::size_t c : tree.order) {
      if (c == root) continue;
      res[c] = L[c] * sol.v[tree.parent[c]] - P[c] * P[c] - Q[c] * Q[c];
    }
    const double worst = kernels::max_abs(res);
    if (!std::isfinite(worst)) throw DivergenceError("sweep produced non-finite values");
    if (worst <= conf.tolerance) {
      sol.p_substation = down_p[root] - sol.p_injection[root];
      sol.q_substation = down_q[root] - sol.q_injection[root];
      for (std::size_t c : tree.order) {
        if (c == root) continue;
        const auto e = static_cast<std::size_t>(tree.parent_branch[c]);
        const auto& br = branches[e];
        sol.l[e] = L[c];
        if (net.bus_index(br.from) == tree.parent[c]) {
          sol.p[e] = P[c];
          sol.q[e] = Q[c];
        } else {
          sol.p[e] = -(P[c] - br.r * L[c]);
          sol.q[e] = -(Q[c] - br.x * L[c]);
        }
      }
      return;
    }
  }
  (void)closed;
  throw DivergenceError("backward/forward sweep did not converge in " + std::to_string(conf.max_iterations) +
                        " iterations");
}

/// Damped Newton on the branch-flow equations plus one angle-closure equation
/// per independent loop, which makes the system square.
class NewtonFlow {
 public:
  NewtonFlow(const Network& net, std::span<const std::uint8_t> closed, PowerFlowSolution& sol)
      : net_(net), sol_(sol) {
    const std::size_t n = net.bus_count();
    root_ = net.substation_index();
    vpos_.assign(n, -1);
    int k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != root_) vpos_[i] = k++;
    }
    nv_ = static_cast<std::size_t>(k);
    for (std::size_t e = 0; e < net.branch_count(); ++e) {
      if (closed[e]) edges_.push_back(e);
    }
    loops_ = fundamental_loops(net, closed);
    unknowns_ = nv_ + 3 * edges_.size();
    edge_slot_.assign(net.branch_count(), -1);
    for (std::size_t k2 = 0; k2 < edges_.size(); ++k2) edge_slot_[edges_[k2]] = static_cast<std::ptrdiff_t>(k2);
  }

  void solve(const SolverConfig& conf) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(unknowns_));
    for (std::size_t i = 0; i < nv_; ++i) x[static_cast<Eigen::Index>(i)] = sol_.v[root_];

    Eigen::VectorXd f = residual(x);
    double norm = f.lpNorm<Eigen::Infinity>();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    for (int it = 1; it <= conf.max_iterations; ++it) {
      sol_.iterations = it;
      if (norm <= conf.tolerance) break;
      const auto jac = jacobian(x);
      if (!analyzed) {
        lu.analyzePattern(jac);
        analyzed = true;
      }
      lu.factorize(jac);
      if (lu.info() != Eigen::Success) throw DivergenceError("singular Newton Jacobian");
      const Eigen::VectorXd dx = lu.solve(-f);
      double step = 1.0;
      Eigen::VectorXd trial = x + dx;
      Eigen::VectorXd ft = residual(trial);
      double nt = ft.lpNorm<Eigen::Infinity>();
      for (int halvings = 0; !(nt < norm) && halvings < 30; ++halvings) {
        step *= 0.5;
        trial = x + step * dx;
        ft = residual(trial);
        nt = ft.lpNorm<Eigen::Infinity>();
      }
      if (!std::isfinite(nt)) throw DivergenceError("Newton iteration produced non-finite values");
      x = std::move(trial);
      f = std::move(ft);
      norm = nt;
    }
    if (!(norm <= conf.tolerance)) {
      throw DivergenceError("Newton power flow did not converge in " + std::to_string(conf.max_iterations) +
                            " iterations (residual " + std::to_string(norm) + ")");
    }
    store(x);
  }

 private:
  double v_of(const Eigen::VectorXd& x, std::size_t bus) const {
    return bus == root_ ? sol_.v[root_] : x[vpos_[bus]];
  }
  Eigen::Index pi(std::size_t k) const { return static_cast<Eigen::Index>(nv_ + 3 * k); }
  Eigen::Index qi(std::size_t k) const { return pi(k) + 1; }
  Eigen::Index li(std::size_t k) const { return pi(k) + 2; }

  /// Angle difference across a branch, from the sending-end quantities.
  static double theta(const Branch& br, double vi, double p, double q) {
    return std::atan2(br.x * p - br.r * q, vi - br.r * p - br.x * q);
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
    const std::size_t m = edges_.size();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(unknowns_));
    // Nodal balances: rows [0, nv) active, [nv, 2 nv) reactive.
    for (std::size_t i = 0; i < net_.bus_count(); ++i) {
      if (i == root_) continue;
      f[vpos_[i]] += sol_.p_injection[i];
      f[static_cast<Eigen::Index>(nv_) + vpos_[i]] += sol_.q_injection[i];
    }
    for (std::size_t k = 0; k < m; ++k) {
      const auto& br = net_.branches()[edges_[k]];
      const std::size_t i = net_.bus_index(br.from);
      const std::size_t j = net_.bus_index(br.to);
      const double p = x[pi(k)], q = x[qi(k)], l = x[li(k)];
      if (j != root_) {
        f[vpos_[j]] += p - br.r * l;
        f[static_cast<Eigen::Index>(nv_) + vpos_[j]] += q - br.x * l;
      }
      if (i != root_) {
        f[vpos_[i]] -= p;
        f[static_cast<Eigen::Index>(nv_) + vpos_[i]] -= q;
      }
      const double vi = v_of(x, i), vj = v_of(x, j);
      const auto row = static_cast<Eigen::Index>(2 * nv_ + 2 * k);
      f[row] = vi - vj - 2.0 * (br.r * p + br.x * q) + (br.r * br.r + br.x * br.x) * l;
      f[row + 1] = l * vi - p * p - q * q;
    }
    for (std::size_t c = 0; c < loops_.size(); ++c) {
      double sum = 0.0;
      for (const auto& lb : loops_[c].branches()) {
        const std::size_t e = net_.branch_index(lb.branch);
        const auto k = static_cast<std::size_t>(edge_slot_[e]);
        const auto& br = net_.branches()[e];
        sum += lb.orientation * theta(br, v_of(x, net_.bus_index(br.from)), x[pi(k)], x[qi(k)]);
      }
      f[static_cast<Eigen::Index>(2 * nv_ + 2 * m + c)] = sum;
    }
    return f;
  }

  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& x) const {
    const std::size_t m = edges_.size();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(16 * m + 8 * nv_);
    const auto nvi = static_cast<Eigen::Index>(nv_);
    for (std::size_t k = 0; k < m; ++k) {
      const auto& br = net_.branches()[edges_[k]];
      const std::size_t i = net_.bus_index(br.from);
      const std::size_t j = net_.bus_index(br.to);
      const double p = x[pi(k)], q = x[qi(k)], l = x[li(k)];
      if (j != root_) {
        t.emplace_back(vpos_[j], pi(k), 1.0);
        t.emplace_back(vpos_[j], li(k), -br.r);
        t.emplace_back(nvi + vpos_[j], qi(k), 1.0);
        t.emplace_back(nvi + vpos_[j], li(k), -br.x);
      }
      if (i != root_) {
        t.emplace_back(vpos_[i], pi(k), -1.0);
        t.emplace_back(nvi + vpos_[i], qi(k), -1.0);
      }
      const auto row = static_cast<Eigen::Index>(2 * nv_ + 2 * k);
      if (i != root_) t.emplace_back(row, vpos_[i], 1.0);
      if (j != root_) t.emplace_back(row, vpos_[j], -1.0);
      t.emplace_back(row, pi(k), -2.0 * br.r);
      t.emplace_back(row, qi(k), -2.0 * br.x);
      t.emplace_back(row, li(k), br.r * br.r + br.x * br.x);
      const double vi = v_of(x, i);
      if (i != root_) t.emplace_back(row + 1, vpos_[i], l);
      t.emplace_back(row + 1, li(k), vi);
      t.emplace_back(row + 1, pi(k), -2.0 * p);
      t.emplace_back(row + 1, qi(k), -2.0 * q);
    }
    for (std::size_t c = 0; c < loops_.size(); ++c) {
      const auto row = static_cast<Eigen::Index>(2 * nv_ + 2 * m + c);
      for (const auto& lb : loops_[c].branches()) {
        const std::size_t e = net_.branch_index(lb.branch);
        const auto k = static_cast<std::size_t>(edge_slot_[e]);
        const auto& br = net_.branches()[e];
        const std::size_t i = net_.bus_index(br.from);
        const double vi = v_of(x, i), p = x[pi(k)], q = x[qi(k)];
        const double Y = br.x * p - br.r * q;
        const double X = vi - br.r * p - br.x * q;
        const double d = X * X + Y * Y;
        const double s = lb.orientation;
        t.emplace_back(row, pi(k), s * (X * br.x + Y * br.r) / d);
        t.emplace_back(row, qi(k), s * (-X * br.r + Y * br.x) / d);
        if (i != root_) t.emplace_back(row, vpos_[i], s * (-Y / d));
      }
    }
    Eigen::SparseMatrix<double> jac(static_cast<Eigen::Index>(unknowns_), static_cast<Eigen::Index>(unknowns_));
    jac.setFromTriplets(t.begin(), t.end());
    return jac;
  }

  void store(const Eigen::VectorXd& x) {
    for (std::size_t i = 0; i < net_.bus_count(); ++i) {
      if (i != root_) sol_.v[i] = x[vpos_[i]];
    }
    double ps = -sol_.p_injection[root_];
    double qs = -sol_.q_injection[root_];
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const std::size_t e = edges_[k];
      const auto& br = net_.branches()[e];
      sol_.p[e] = x[pi(k)];
      sol_.q[e] = x[qi(k)];
      sol_.l[e] = x[li(k)];
      if (net_.bus_index(br.from) == root_) {
        ps += sol_.p[e];
        qs += sol_.q[e];
      }
      if (net_.bus_index(br.to) == root_) {
        ps -= sol_.p[e] - br.r * sol_.l[e];
        qs -= sol_.q[e] - br.x * sol_.l[e];
      }
    }
    sol_.p_substation = ps;
    sol_.q_substation = qs;
  }

  const Network& net_;
  PowerFlowSolution& sol_;
  std::size_t root_ = 0;
  std::vector<int> vpos_;
  std::size_t nv_ = 0;
  std::vector<std::size_t> edges_;
  std::vector<std::ptrdiff_t> edge_slot_;
  std::vector<Loop> loops_;
  std::size_t unknowns_ = 0;
};

void check_limits(const Network& net, const SolverConfig& conf, PowerFlowSolution& sol) {
  const double tol = conf.tolerance;
  auto flag = [&](std::string what, int id, double value, double limit) {
    sol.violations.push_back({std::move(what), id, value, limit});
  };
  for (std::size_t i = 0; i < net.bus_count(); ++i) {
    const auto& b = net.buses()[i];
    if (sol.v[i] < b.v_min * b.v_min - tol) flag("voltage-min", b.id, sol.v[i], b.v_min * b.v_min);
    if (sol.v[i] > b.v_max * b.v_max + tol) flag("voltage-max", b.id, sol.v[i], b.v_max * b.v_max);
  }
  const auto& sub = net.buses()[net.substation_index()];
  const InjectionLimits lim = sub.injection.value_or(InjectionLimits{});
  if (sol.p_substation > lim.p_max + tol) flag("substation-p-max", sub.id, sol.p_substation, lim.p_max);
  if (sol.p_substation < lim.p_min - tol) flag("substation-p-min", sub.id, sol.p_substation, lim.p_min);
  if (sol.q_substation > lim.q_max + tol) flag("substation-q-max", sub.id, sol.q_substation, lim.q_max);
  if (sol.q_substation < lim.q_min - tol) flag("substation-q-min", sub.id, sol.q_substation, lim.q_min);
  for (std::size_t e = 0; e < net.branch_count(); ++e) {
    const auto& br = net.branches()[e];
    if (!sol.closed[e]) {
      const double dv = std::abs(sol.v[net.bus_index(br.from)] - sol.v[net.bus_index(br.to)]);
      if (dv > conf.big_m + tol) flag("open-branch-voltage", br.id, dv, conf.big_m);
      continue;
    }
    const double s2 = sol.p[e] * sol.p[e] + sol.q[e] * sol.q[e];
    if (s2 > br.s_max * br.s_max + tol) flag("branch-apparent", br.id, std::sqrt(s2), br.s_max);
    if (std::abs(sol.p[e]) > br.p_max + tol) flag("branch-active", br.id, sol.p[e], br.p_max);
    if (std::abs(sol.q[e]) > br.q_max + tol) flag("branch-reactive", br.id, sol.q[e], br.q_max);
    if (sol.l[e] > br.i_max * br.i_max + tol) flag("branch-current", br.id, sol.l[e], br.i_max * br.i_max);
  }
  if (conf.limits == LimitMode::reject && !sol.violations.empty()) {
    const auto& v = sol.violations.front();
    std::ostringstream os;
    os << v.constraint << " limit violated at " << v.element << " (value " << v.value << ", limit " << v.limit
       << ")";
    throw InfeasibleError(v.constraint, os.str());
  }
}

std::string join_indices(const std::vector<std::size_t>& idx) {
  std::ostringstream os;
  for (std::size_t k = 0; k < idx.size(); ++k) os << (k ? ", " : "") << idx[k];
  return os.str();
}

}  // namespace

ScenarioFailure::ScenarioFailure(std::vector<std::size_t> failed, std::vector<std::string> reasons, bool infeasible)
    : Error("scenario solve failed for scenario(s) " + join_indices(failed) + ": " +
            (reasons.empty() ? std::string() : reasons.front())),
      failed_(std::move(failed)),
      reasons_(std::move(reasons)),
      infeasible_(infeasible) {}

PowerFlowSolution solve_opf_r(const Network& net, std::span<const std::uint8_t> closed, const Scenario& scenario,
                              const SolverConfig& conf) {
  check_config(net, conf);
  if (closed.size() != net.branch_count()) throw ConfigurationMismatch("closed mask does not match the network");
  const std::size_t n = net.bus_count();
  const Rooted tree = root_closed_graph(net, closed);

  PowerFlowSolution sol;
  sol.closed.assign(closed.begin(), closed.end());
  sol.p_injection = net_injection(scenario, n, true);
  sol.q_injection = net_injection(scenario, n, false);
  sol.p_injection[net.substation_index()] = 0.0;
  sol.q_injection[net.substation_index()] = 0.0;
  const double vs = net.buses()[net.substation_index()].v_set;
  sol.v.assign(n, vs * vs);
  sol.p.assign(net.branch_count(), 0.0);
  sol.q.assign(net.branch_count(), 0.0);
  sol.l.assign(net.branch_count(), 0.0);

  const std::size_t closed_count = static_cast<std::size_t>(std::count(closed.begin(), closed.end(), 1));
  const bool radial = closed_count + 1 == n;
  FlowMethod method = conf.method;
  if (method == FlowMethod::automatic) method = radial ? FlowMethod::sweep : FlowMethod::newton;
  if (method == FlowMethod::sweep && !radial) throw ArgumentError("the sweep needs a radial configuration");
  sol.method = method;
  if (method == FlowMethod::sweep) {
    sweep(net, closed, tree, conf, sol);
  } else {
    NewtonFlow(net, closed, sol).solve(conf);
  }

  sol.p_injection[net.substation_index()] = sol.p_substation;
  sol.q_injection[net.substation_index()] = sol.q_substation;
  sol.objective = sol.p_substation;
  for (std::size_t e = 0; e < net.branch_count(); ++e) sol.loss += net.branches()[e].r * sol.l[e];
  sol.max_residual = std::max(power_balance_residual(net, sol), soc_exactness_residual(net, sol).max);
  check_limits(net, conf, sol);
  return sol;
}

PowerFlowSolution solve_opf_r(const Network& net, const SwitchConfiguration& cfg, const Scenario& scenario,
                              const SolverConfig& conf) {
  const auto closed = cfg.closed_mask(net);
  return solve_opf_r(net, std::span<const std::uint8_t>(closed), scenario, conf);
}

StochasticSolution solve_sopf_r(const Network& net, std::span<const std::uint8_t> closed,
                                const ScenarioSet& scenarios, const SolverConfig& conf) {
  const std::size_t w = scenarios.size();
  std::vector<PowerFlowSolution> sols(w);
  std::vector<std::string> errors(w);
  std::vector<int> kinds(w, 0);  // 0 ok, 1 infeasible, 2 other
  parallel_for(w, conf.jobs, [&](std::size_t k) {
    try {
      sols[k] = solve_opf_r(net, closed, scenarios[k], conf);
    } catch (const InfeasibleError& e) {
      errors[k] = e.what();
      kinds[k] = 1;
    } catch (const Error& e) {
      errors[k] = e.what();
      kinds[k] = 2;
    }
  });
  std::vector<std::size_t> failed;
  std::vector<std::string> reasons;
  bool infeasible = true;
  for (std::size_t k = 0; k < w; ++k) {
    if (kinds[k] == 0) continue;
    failed.push_back(k);
    reasons.push_back(errors[k]);
    infeasible = infeasible && kinds[k] == 1;
  }
  if (!failed.empty()) throw ScenarioFailure(std::move(failed), std::move(reasons), infeasible);

  StochasticSolution out;
  out.expected_flow.assign(net.branch_count(), 0.0);
  out.expected_abs_flow.assign(net.branch_count(), 0.0);
  for (std::size_t k = 0; k < w; ++k) {
    const double pi = scenarios[k].probability;
    out.probabilities.push_back(pi);
    out.expected_objective += pi * sols[k].objective;
    out.expected_loss += pi * sols[k].loss;
    kernels::weighted_accumulate(pi, sols[k].p, out.expected_flow);
    kernels::weighted_accumulate_abs(pi, sols[k].p, out.expected_abs_flow);
  }
  out.scenarios = std::move(sols);
  return out;
}

StochasticSolution solve_sopf_r(const Network& net, const SwitchConfiguration& cfg, const ScenarioSet& scenarios,
                                const SolverConfig& conf) {
  const auto closed = cfg.closed_mask(net);
  return solve_sopf_r(net, std::span<const std::uint8_t>(closed), scenarios, conf);
}

std::map<int, double> loop_injections(const Network& net, const StochasticSolution& sol, const Loop& loop) {
  if (sol.scenarios.empty()) throw ArgumentError("empty stochastic solution");
  const auto& closed = sol.scenarios.front().closed;
  for (const auto& lb : loop.branches()) {
    if (!net.has_branch(lb.branch)) throw ArgumentError("loop branch " + std::to_string(lb.branch) + " not in network");
    if (!closed[net.branch_index(lb.branch)]) {
      throw ArgumentError("loop branch " + std::to_string(lb.branch) + " is open in the solution");
    }
  }
  std::map<int, double> out;
  for (std::size_t pos = 0; pos + 1 < loop.buses().size(); ++pos) {
    const int bus = loop.buses()[pos];
    const std::size_t i = net.bus_index(bus);
    double expected = 0.0;
    for (std::size_t w = 0; w < sol.scenarios.size(); ++w) {
      const auto& s = sol.scenarios[w];
      double inj = s.p_injection[i];
      for (std::size_t e : net.incident(i)) {
        const auto& br = net.branches()[e];
        if (!s.closed[e] || loop.contains_bus(br.other(bus))) continue;
        if (br.to == bus) inj += s.p[e] - br.r * s.l[e];
        if (br.from == bus) inj -= s.p[e];
      }
      expected += sol.probabilities[w] * inj;
    }
    out[bus] = expected;
  }
  return out;
}

SocResidual soc_exactness_residual(const Network& net, const PowerFlowSolution& sol) {
  SocResidual r;
  r.per_branch.assign(net.branch_count(), 0.0);
  for (std::size_t e = 0; e < net.branch_count(); ++e) {
    if (!sol.closed[e]) continue;
    const double vi = sol.v[net.bus_index(net.branches()[e].from)];
    r.per_branch[e] = std::abs(sol.l[e] * vi - (sol.p[e] * sol.p[e] + sol.q[e] * sol.q[e]));
  }
  r.max = kernels::max_abs(r.per_branch);
  return r;
}

double power_balance_residual(const Network& net, const PowerFlowSolution& sol) {
  std::vector<double> rp(sol.p_injection), rq(sol.q_injection);
  for (std::size_t e = 0; e < net.branch_count(); ++e) {
    if (!sol.closed[e]) continue;
    const auto& br = net.branches()[e];
    const std::size_t i = net.bus_index(br.from), j = net.bus_index(br.to);
    rp[j] += sol.p[e] - br.r * sol.l[e];
    rq[j] += sol.q[e] - br.x * sol.l[e];
    rp[i] -= sol.p[e];
    rq[i] -= sol.q[e];
  }
  return std::max(kernels::max_abs(rp), kernels::max_abs(rq));
}

double network_balance_residual(const PowerFlowSolution& sol) {
  double injected = 0.0;
  for (double p : sol.p_injection) injected += p;  // includes p_s
  return std::abs(injected - sol.loss);
}

}  // namespace sdnr
