#include "random_feeder.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "sdnr/error.hpp"

namespace sdnr::testing {

Network network_from_edges(int n, const std::vector<std::pair<int, int>>& edges, double r, double x) {
  std::vector<Bus> buses;
  for (int i = 0; i < n; ++i) {
    Bus b;
    b.id = i;
    if (i == 0) {
      b.kind = BusKind::substation;
      b.injection = InjectionLimits{};
    }
    buses.push_back(b);
  }
  std::vector<Branch> branches;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    Branch br;
    br.id = static_cast<int>(k) + 1;
    br.from = edges[k].first;
    br.to = edges[k].second;
    br.r = r;
    br.x = x;
    branches.push_back(br);
  }
  return Network(buses, branches);
}

ScenarioSet random_scenarios(const Network& net, std::mt19937_64& rng, std::size_t count, double renewable_share) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = net.bus_count();
  std::vector<int> kind(n, 0);  // 0 none, 1 load, 2 renewable
  std::vector<double> size(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == net.substation_index()) continue;
    kind[i] = u(rng) < renewable_share ? 2 : 1;
    size[i] = kind[i] == 1 ? 0.01 + 0.04 * u(rng) : 0.02 + 0.08 * u(rng);
  }
  std::vector<double> weight(count);
  double total = 0.0;
  for (auto& w : weight) total += (w = 0.5 + u(rng));
  const double tan_pf = std::tan(std::acos(0.95));
  std::vector<Scenario> out;
  double used = 0.0;
  for (std::size_t w = 0; w < count; ++w) {
    Scenario s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
               std::vector<double>(n, 0.0), 0.0};
    s.probability = w + 1 == count ? 1.0 - used : weight[w] / total;
    used += s.probability;
    const double load_factor = 0.6 + 0.5 * u(rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (kind[i] == 1) {
        s.p_load[i] = size[i] * load_factor * (0.9 + 0.2 * u(rng));
        s.q_load[i] = s.p_load[i] * tan_pf;
      } else if (kind[i] == 2) {
        s.p_renewable[i] = size[i] * u(rng);
        s.q_renewable[i] = s.p_renewable[i] * tan_pf;
      }
    }
    out.push_back(std::move(s));
  }
  return ScenarioSet(std::move(out));
}

Instance random_feeder(std::mt19937_64& rng, const FeederSpec& spec) {
  std::uniform_int_distribution<int> nd(spec.min_buses, spec.max_buses);
  std::uniform_real_distribution<double> z(spec.z_lo, spec.z_hi);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = nd(rng);

  std::vector<std::pair<int, int>> edges;
  std::set<std::pair<int, int>> present;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pd(std::max(0, i - 3), i - 1);
    const int p = pd(rng);
    edges.emplace_back(p, i);
    present.emplace(p, i);
  }
  if (static_cast<long>(n) * (n - 1) / 2 < n - 1 + spec.loops) {
    throw ArgumentError("too many loops for " + std::to_string(n) + " buses");
  }
  std::uniform_int_distribution<int> any(0, n - 1);
  for (int added = 0; added < spec.loops;) {
    int a = any(rng), b = any(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (present.count({a, b})) continue;
    present.emplace(a, b);
    edges.emplace_back(a, b);
    ++added;
  }

  std::vector<int> ids(edges.size());
  for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = static_cast<int>(k) + 1;
  std::shuffle(ids.begin(), ids.end(), rng);

  std::vector<Bus> buses;
  for (int i = 0; i < n; ++i) {
    Bus b;
    b.id = i;
    if (i == 0) {
      b.kind = BusKind::substation;
      b.injection = InjectionLimits{};
    }
    buses.push_back(b);
  }
  std::vector<Branch> branches;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    Branch br;
    br.id = ids[k];
    br.from = edges[k].first;
    br.to = edges[k].second;
    if (u(rng) < 0.5) std::swap(br.from, br.to);
    br.r = z(rng);
    br.x = z(rng);
    branches.push_back(br);
  }
  Network net(buses, branches);
  auto scen = random_scenarios(net, rng, spec.scenarios, spec.renewable_share);
  return Instance{std::move(net), std::move(scen)};
}

}  // namespace sdnr::testing
