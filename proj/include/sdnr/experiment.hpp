#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdnr/case_io.hpp"
#include "sdnr/distflow.hpp"
#include "sdnr/sbr.hpp"
#include "sdnr/scenarios.hpp"

namespace sdnr {

enum class Method { proposed, baseline, oracle };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// Where hourly profiles come from and how they become a scenario set.
struct ScenarioSource {
  std::optional<std::filesystem::path> csv;  // synthetic profiles when empty
  ColumnMapping columns;
  int days = 90;
  std::uint64_t seed = 1;
  std::size_t scenarios = 5;
  double renewable_scale = 1.0;
  PowerFactors power_factors;
};

struct RunOptions {
  SolverConfig solver;
  std::uint64_t budget = 100000;
  std::size_t jobs = 1;       // hours evaluated concurrently
  bool compare_oracle = false;
  bool record_timing = true;  // false leaves `ms` blank for byte-stable output
};

struct RunRecord {
  int hour = 0;
  Method method = Method::proposed;
  bool ok = false;
  std::string error;
  double objective_pu = 0.0;  // expected loss
  double objective_kw = 0.0;
  std::vector<int> opened;
  std::optional<double> relerr_pct;
  std::size_t opf_solves = 0;
  std::size_t sopf_solves = 0;
  std::optional<double> ms;
  std::string oracle_note;  // set when the reference run was skipped
  std::vector<int> stage1_open;
  std::vector<CandidateEvaluation> trace;
  std::vector<std::string> notes;
};

struct RunReport {
  std::string case_name;
  std::string axis;   // empty for a plain solve
  double value = 0.0;
  Method method = Method::proposed;
  std::vector<RunRecord> records;

  std::vector<int> failed_hours() const;
};

/// Scenario set for one hour of the day.
ScenarioSet hour_scenarios(const Network& net, const CaseDocument& doc, const TimeSeriesTable& table,
                           const ScenarioSource& src, int hour);

TimeSeriesTable load_profiles(const ScenarioSource& src);

RunReport run_solve(const CaseDocument& doc, const ScenarioSource& src, Method method, std::span<const int> hours,
                    const RunOptions& opts);

enum class SweepAxis { renewable_scale, scenario_count };

std::string_view axis_name(SweepAxis a);

std::vector<RunReport> run_sweep(const CaseDocument& doc, const ScenarioSource& src, SweepAxis axis,
                                 std::span<const double> values, std::span<const Method> methods,
                                 std::span<const int> hours, const RunOptions& opts);

struct SummaryStat {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
  std::size_t count = 0;
};

/// Mean/max/min of relative error (over records that have one) and of objective.
struct ReportSummary {
  SummaryStat relerr_pct;
  SummaryStat objective_kw;
  SummaryStat opf_solves;
};

ReportSummary summarize(const RunReport& report);

inline constexpr std::string_view kCsvHeader = "hour,method,objective_pu,objective_kw,opened,relerr_pct,opf_solves,ms";

/// Fixed-header CSV. Sweeps label the method column `method@axis=value` and
/// follow each group with mean/max/min rows.
std::string to_csv(std::span<const RunReport> reports, bool summary_rows);
std::string to_json(std::span<const RunReport> reports);
/// One row per (hour, method, metric) for plotting.
std::string to_long_csv(std::span<const RunReport> reports);

/// Exit code of a finished run: 0 all hours solved, 1 otherwise.
int exit_code(std::span<const RunReport> reports);

}  // namespace sdnr
