#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "sdnr/network.hpp"

namespace sdnr {

/// Hourly relative profiles: aggregate load factor and wind/solar capacity factors.
struct TimeSeriesTable {
  std::vector<double> load;
  std::vector<double> wind;
  std::vector<double> solar;

  std::size_t rows() const { return load.size(); }
};

struct RejectedRow {
  std::size_t line = 0;  // 1-based line in the source, header is line 1
  std::string reason;
};

struct IngestResult {
  TimeSeriesTable table;
  std::vector<RejectedRow> rejected;
};

struct ColumnMapping {
  std::string load = "load";
  std::string wind = "wind";
  std::string solar = "solar";
};

IngestResult ingest_csv(std::istream& in, const ColumnMapping& columns = {});
IngestResult ingest_csv(const std::filesystem::path& path, const ColumnMapping& columns = {});

/// Rows `hour`, `hour + 24`, ... of an hourly table: the same hour across days.
TimeSeriesTable rows_for_hour(const TimeSeriesTable& table, int hour);

/// Daily sinusoidal load with noise, bell-shaped solar, autocorrelated wind.
TimeSeriesTable synthetic_profiles(int days, std::uint64_t seed);

/// One representative profile row and its probability.
struct ScenarioFactor {
  double load = 0.0;
  double wind = 0.0;
  double solar = 0.0;
  double probability = 0.0;
  std::size_t medoid_row = 0;
};

struct KMedoidsResult {
  std::vector<ScenarioFactor> factors;
  std::vector<std::size_t> assignment;  // cluster index per input row
  std::vector<double> cost_history;     // total dissimilarity after init and each swap
};

/// PAM on z-scored columns with Euclidean distance: k-means++ seeding from
/// `seed`, then best-improvement swaps until no swap lowers the total cost.
/// Medoids are reported in ascending row order; probabilities are cluster
/// sizes over the row count.
KMedoidsResult reduce_kmedoids(const TimeSeriesTable& table, std::size_t k, std::uint64_t seed);

/// Per-bus installed quantities (per-unit). A bus may carry a load, a
/// wind/solar pair, or both.
struct BusProfile {
  double load_peak = 0.0;
  double wind_capacity = 0.0;
  double solar_capacity = 0.0;
};

struct PowerFactors {
  double load = 0.95;
  double renewable = 0.95;
};

/// Injections of one scenario, indexed by dense bus index (zero at the substation).
struct Scenario {
  std::vector<double> p_renewable;
  std::vector<double> q_renewable;
  std::vector<double> p_load;
  std::vector<double> q_load;
  double probability = 1.0;

  double p_net(std::size_t bus) const { return p_renewable[bus] - p_load[bus]; }
  double q_net(std::size_t bus) const { return q_renewable[bus] - q_load[bus]; }
};

/// Probability-weighted scenarios; probabilities must sum to 1 within 1e-12.
class ScenarioSet {
 public:
  explicit ScenarioSet(std::vector<Scenario> scenarios);

  const std::vector<Scenario>& scenarios() const { return scenarios_; }
  std::size_t size() const { return scenarios_.size(); }
  const Scenario& operator[](std::size_t w) const { return scenarios_[w]; }

  /// Expected net demand sum_w pi_w sum_i (p_load - p_renewable).
  double expected_net_demand() const;

 private:
  std::vector<Scenario> scenarios_;
};

/// A single scenario with probability 1 and the given fixed injections.
Scenario make_scenario(const Network& net, const std::map<int, double>& p_net, const std::map<int, double>& q_net);

ScenarioSet build_scenarios(const Network& net, const std::vector<ScenarioFactor>& factors,
                            const std::map<int, BusProfile>& profiles, double renewable_scale,
                            const PowerFactors& pf);

}  // namespace sdnr
