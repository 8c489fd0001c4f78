#include "sdnr/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "sdnr/error.hpp"
#include "sdnr/kernels.hpp"

namespace sdnr {

namespace {

std::string trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '"'; };
  auto b = std::find_if(s.begin(), s.end(), not_space);
  auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return b < e ? std::string(b, e) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(trim(field));
  return out;
}

/// Parses a non-negative finite decimal; empty optional-like result via bool.
bool parse_value(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out) && out >= 0.0;
}

void check_pf(double pf, const char* what) {
  if (!(pf > 0.0 && pf <= 1.0)) {
    throw ArgumentError(std::string(what) + " power factor must lie in (0, 1]");
  }
}

}  // namespace

IngestResult ingest_csv(std::istream& in, const ColumnMapping& columns) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError("empty CSV input");
  ++line_no;
  const auto header = split_csv_line(line);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError("line 1", "missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_load = column(columns.load);
  const std::size_t c_wind = column(columns.wind);
  const std::size_t c_solar = column(columns.solar);

  IngestResult result;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    double v[3];
    const std::size_t idx[3] = {c_load, c_wind, c_solar};
    const std::string* names[3] = {&columns.load, &columns.wind, &columns.solar};
    bool ok = true;
    for (int k = 0; k < 3 && ok; ++k) {
      if (idx[k] >= fields.size()) {
        result.rejected.push_back({line_no, "missing field '" + *names[k] + "'"});
        ok = false;
      } else if (!parse_value(fields[idx[k]], v[k])) {
        result.rejected.push_back({line_no, "unparseable " + *names[k] + " value '" + fields[idx[k]] + "'"});
        ok = false;
      }
    }
    if (!ok) continue;
    result.table.load.push_back(v[0]);
    result.table.wind.push_back(v[1]);
    result.table.solar.push_back(v[2]);
  }
  if (result.table.rows() == 0) throw DataError("no usable rows in CSV input");
  return result;
}

IngestResult ingest_csv(const std::filesystem::path& path, const ColumnMapping& columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return ingest_csv(in, columns);
}

TimeSeriesTable rows_for_hour(const TimeSeriesTable& table, int hour) {
  if (hour < 0 || hour > 23) throw ArgumentError("hour must lie in 0..23");
  TimeSeriesTable out;
  for (std::size_t r = static_cast<std::size_t>(hour); r < table.rows(); r += 24) {
    out.load.push_back(table.load[r]);
    out.wind.push_back(table.wind[r]);
    out.solar.push_back(table.solar[r]);
  }
  if (out.rows() == 0) throw DataError("no rows for hour " + std::to_string(hour));
  return out;
}

TimeSeriesTable synthetic_profiles(int days, std::uint64_t seed) {
  if (days < 1) throw ArgumentError("days must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  TimeSeriesTable t;
  double wind = 0.35;
  for (int d = 0; d < days; ++d) {
    const double cloud_day = std::clamp(0.75 + 0.2 * noise(rng), 0.1, 1.0);
    for (int h = 0; h < 24; ++h) {
      const double load = 0.62 + 0.22 * std::sin(2.0 * std::numbers::pi * (h - 13) / 24.0) + 0.04 * noise(rng);
      t.load.push_back(std::clamp(load, 0.2, 1.2));
      double solar = 0.0;
      if (h > 6 && h < 19) {
        const double bell = std::sin(std::numbers::pi * (h - 6) / 13.0);
        solar = std::clamp(bell * (cloud_day + 0.1 * noise(rng)), 0.0, 1.0);
      }
      t.solar.push_back(solar);
      wind = std::clamp(0.9 * wind + 0.1 * 0.35 + 0.07 * noise(rng), 0.0, 1.0);
      t.wind.push_back(wind);
    }
  }
  return t;
}

KMedoidsResult reduce_kmedoids(const TimeSeriesTable& table, std::size_t k, std::uint64_t seed) {
  const std::size_t n = table.rows();
  if (k < 1) throw ArgumentError("k must be at least 1");
  if (k > n) throw ArgumentError("k = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " rows");

  // Column-major z-scored features.
  constexpr std::size_t dims = 3;
  const std::vector<double>* cols[dims] = {&table.load, &table.wind, &table.solar};
  std::vector<double> features(dims * n);
  for (std::size_t c = 0; c < dims; ++c) {
    const auto& col = *cols[c];
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
    for (std::size_t j = 0; j < n; ++j) features[c * n + j] = (col[j] - mean) * scale;
  }

  std::vector<double> dist(n * n);
  std::vector<double> point(dims);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < dims; ++c) point[c] = features[c * n + i];
    std::span<double> row(dist.data() + i * n, n);
    kernels::squared_distances(features, n, point, row);
    for (double& d : row) d = std::sqrt(d);
  }
  auto row_of = [&](std::size_t i) { return std::span<const double>(dist.data() + i * n, n); };

  // k-means++ style seeding.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> medoids{std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)};
  std::vector<double> nearest(row_of(medoids[0]).begin(), row_of(medoids[0]).end());
  while (medoids.size() < k) {
    double total = 0.0;
    for (double d : nearest) total += d * d;
    std::size_t pick = n;
    if (total > 0.0) {
      double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (std::size_t j = 0; j < n; ++j) {
        const double w = nearest[j] * nearest[j];
        if (w <= 0.0) continue;
        pick = j;
        if (target < w) break;
        target -= w;
      }
    }
    if (pick == n || std::find(medoids.begin(), medoids.end(), pick) != medoids.end()) {
      for (std::size_t j = 0; j < n; ++j) {
        if (std::find(medoids.begin(), medoids.end(), j) == medoids.end()) {
          pick = j;
          break;
        }
      }
    }
    medoids.push_back(pick);
    kernels::min_inplace(nearest, row_of(pick));
  }

  KMedoidsResult result;
  double cost = kernels::sum_of_min(nearest, nearest);
  result.cost_history.push_back(cost);

  // Best-improvement swap phase.
  std::vector<double> without(n);
  for (;;) {
    double best = cost;
    std::size_t best_slot = k;
    std::size_t best_row = n;
    for (std::size_t slot = 0; slot < k; ++slot) {
      std::fill(without.begin(), without.end(), std::numeric_limits<double>::infinity());
      for (std::size_t o = 0; o < k; ++o) {
        if (o != slot) kernels::min_inplace(without, row_of(medoids[o]));
      }
      for (std::size_t h = 0; h < n; ++h) {
        if (std::find(medoids.begin(), medoids.end(), h) != medoids.end()) continue;
        const double c = kernels::sum_of_min(without, row_of(h));
        if (c < best) {
          best = c;
          best_slot = slot;
          best_row = h;
        }
      }
    }
    if (best_slot == k || !(best < cost - 1e-12 * std::abs(cost))) break;
    medoids[best_slot] = best_row;
    std::fill(nearest.begin(), nearest.end(), std::numeric_limits<double>::infinity());
    for (std::size_t m : medoids) kernels::min_inplace(nearest, row_of(m));
    cost = kernels::sum_of_min(nearest, nearest);
    result.cost_history.push_back(cost);
  }

  std::sort(medoids.begin(), medoids.end());
  std::vector<std::size_t> sizes(k, 0);
  result.assignment.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t best = 0;
    for (std::size_t m = 1; m < k; ++m) {
      if (dist[medoids[m] * n + j] < dist[medoids[best] * n + j]) best = m;
    }
    result.assignment[j] = best;
    ++sizes[best];
  }
  for (std::size_t m = 0; m < k; ++m) {
    const std::size_t r = medoids[m];
    result.factors.push_back({table.load[r], table.wind[r], table.solar[r],
                              static_cast<double>(sizes[m]) / static_cast<double>(n), r});
  }
  return result;
}

ScenarioSet::ScenarioSet(std::vector<Scenario> scenarios) : scenarios_(std::move(scenarios)) {
  if (scenarios_.empty()) throw ArgumentError("a scenario set needs at least one scenario");
  const std::size_t n = scenarios_.front().p_load.size();
  double total = 0.0;
  for (const auto& s : scenarios_) {
    if (!(s.probability > 0.0 && s.probability <= 1.0)) throw ArgumentError("scenario probability must lie in (0, 1]");
    if (s.p_load.size() != n || s.q_load.size() != n || s.p_renewable.size() != n || s.q_renewable.size() != n) {
      throw ArgumentError("scenario vectors must all have one entry per bus");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(s.p_load[i] >= 0.0) || !(s.p_renewable[i] >= 0.0)) {
        throw ArgumentError("scenario active powers must be non-negative");
      }
    }
    total += s.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ArgumentError("scenario probabilities must sum to 1");
}

double ScenarioSet::expected_net_demand() const {
  double out = 0.0;
  for (const auto& s : scenarios_) {
    double d = 0.0;
    for (std::size_t i = 0; i < s.p_load.size(); ++i) d += s.p_load[i] - s.p_renewable[i];
    out += s.probability * d;
  }
  return out;
}

Scenario make_scenario(const Network& net, const std::map<int, double>& p_net, const std::map<int, double>& q_net) {
  const std::size_t n = net.bus_count();
  Scenario s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
             std::vector<double>(n, 0.0), 1.0};
  for (const auto& [id, p] : p_net) {
    const std::size_t i = net.bus_index(id);
    if (i == net.substation_index()) throw ArgumentError("substation injection is not an input");
    (p >= 0.0 ? s.p_renewable[i] : s.p_load[i]) = std::abs(p);
  }
  for (const auto& [id, q] : q_net) {
    const std::size_t i = net.bus_index(id);
    if (i == net.substation_index()) throw ArgumentError("substation injection is not an input");
    (q >= 0.0 ? s.q_renewable[i] : s.q_load[i]) = std::abs(q);
  }
  return s;
}

ScenarioSet build_scenarios(const Network& net, const std::vector<ScenarioFactor>& factors,
                            const std::map<int, BusProfile>& profiles, double renewable_scale,
                            const PowerFactors& pf) {
  check_pf(pf.load, "load");
  check_pf(pf.renewable, "renewable");
  if (!(renewable_scale >= 0.0)) throw ArgumentError("renewable scaling must be non-negative");
  const double tan_load = std::tan(std::acos(pf.load));
  const double tan_ren = std::tan(std::acos(pf.renewable));

  const std::size_t n = net.bus_count();
  std::vector<const BusProfile*> by_index(n, nullptr);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == net.substation_index()) continue;
    auto it = profiles.find(net.buses()[i].id);
    if (it == profiles.end()) {
      throw ConfigurationError("bus " + std::to_string(net.buses()[i].id) + " has no load or renewable profile");
    }
    by_index[i] = &it->second;
  }

  std::vector<Scenario> out;
  for (const auto& f : factors) {
    Scenario s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
               std::vector<double>(n, 0.0), f.probability};
    for (std::size_t i = 0; i < n; ++i) {
      if (!by_index[i]) continue;
      const BusProfile& p = *by_index[i];
      s.p_load[i] = f.load * p.load_peak;
      s.q_load[i] = s.p_load[i] * tan_load;
      s.p_renewable[i] = renewable_scale * (f.wind * p.wind_capacity + f.solar * p.solar_capacity);
      s.q_renewable[i] = s.p_renewable[i] * tan_ren;
    }
    out.push_back(std::move(s));
  }
  return ScenarioSet(std::move(out));
}

}  // namespace sdnr
