#include "sdnr/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "sdnr/error.hpp"
#include "sdnr/parallel.hpp"
#include "sdnr/sbr.hpp"

namespace sdnr {

namespace {

std::string num(double v, const char* fmt = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

ReconfigurationResult run_method(const Network& net, const ScenarioSet& scen, Method m, const RunOptions& opts) {
  switch (m) {
    case Method::proposed: return two_stage_sbr(net, scen, opts.solver);
    case Method::baseline: return baseline_two_stage(net, scen, opts.solver);
    case Method::oracle: return exhaustive_oracle(net, scen, opts.solver, opts.budget);
  }
  throw ArgumentError("unknown method");
}

std::string label(const RunReport& r) {
  std::string out(method_name(r.method));
  if (!r.axis.empty()) out += "@" + r.axis + "=" + num(r.value, "%g");
  return out;
}

SummaryStat stat_of(const std::vector<double>& xs) {
  SummaryStat s;
  s.count = xs.size();
  if (xs.empty()) return s;
  s.max = *std::max_element(xs.begin(), xs.end());
  s.min = *std::min_element(xs.begin(), xs.end());
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  return s;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::proposed: return "proposed";
    case Method::baseline: return "baseline";
    case Method::oracle: return "oracle";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "proposed") return Method::proposed;
  if (name == "baseline") return Method::baseline;
  if (name == "oracle") return Method::oracle;
  throw ArgumentError("unknown method \"" + std::string(name) + "\"");
}

std::string_view axis_name(SweepAxis a) { return a == SweepAxis::renewable_scale ? "k_r" : "scenarios"; }

std::vector<int> RunReport::failed_hours() const {
  std::vector<int> out;
  for (const auto& r : records) {
    if (!r.ok) out.push_back(r.hour);
  }
  return out;
}

TimeSeriesTable load_profiles(const ScenarioSource& src) {
  if (src.csv) return ingest_csv(*src.csv, src.columns).table;
  return synthetic_profiles(src.days, src.seed);
}

ScenarioSet hour_scenarios(const Network& net, const CaseDocument& doc, const TimeSeriesTable& table,
                           const ScenarioSource& src, int hour) {
  const auto rows = rows_for_hour(table, hour);
  const std::size_t k = std::min(src.scenarios, rows.rows());
  const auto clusters = reduce_kmedoids(rows, k, src.seed);
  return build_scenarios(net, clusters.factors, doc.profiles, src.renewable_scale, src.power_factors);
}

RunReport run_solve(const CaseDocument& doc, const ScenarioSource& src, Method method, std::span<const int> hours,
                    const RunOptions& opts) {
  const Network net = doc.network();
  const TimeSeriesTable table = load_profiles(src);
  RunReport report;
  report.case_name = doc.name;
  report.method = method;
  report.records.resize(hours.size());

  parallel_for(hours.size(), opts.jobs, [&](std::size_t k) {
    RunRecord& rec = report.records[k];
    rec.hour = hours[k];
    rec.method = method;
    try {
      const ScenarioSet scen = hour_scenarios(net, doc, table, src, hours[k]);
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = run_method(net, scen, method, opts);
      if (opts.record_timing) {
        rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      }
      rec.ok = true;
      rec.objective_pu = r.expected_loss;
      rec.objective_kw = r.expected_loss * net.base_mva() * 1000.0;
      rec.opened = r.opened;
      rec.opf_solves = r.stats.opf_solves;
      rec.sopf_solves = r.stats.sopf_total();
      rec.stage1_open = r.stage1_open;
      rec.trace = r.trace;
      rec.notes = r.notes;
      if (method == Method::oracle) {
        rec.relerr_pct = 0.0;
      } else if (opts.compare_oracle) {
        try {
          const auto ref = exhaustive_oracle(net, scen, opts.solver, opts.budget);
          if (ref.expected_loss > 0.0) {
            rec.relerr_pct = (r.expected_loss - ref.expected_loss) / ref.expected_loss * 100.0;
          } else {
            rec.oracle_note = "reference loss is zero";
          }
        } catch (const BudgetExceeded& e) {
          rec.oracle_note = e.what();
        } catch (const Error& e) {
          rec.oracle_note = std::string("reference run failed: ") + e.what();
        }
      }
    } catch (const Error& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  });
  return report;
}

std::vector<RunReport> run_sweep(const CaseDocument& doc, const ScenarioSource& src, SweepAxis axis,
                                 std::span<const double> values, std::span<const Method> methods,
                                 std::span<const int> hours, const RunOptions& opts) {
  std::vector<RunReport> out;
  for (double v : values) {
    ScenarioSource point = src;
    if (axis == SweepAxis::renewable_scale) {
      point.renewable_scale = v;
    } else {
      if (!(v >= 1.0) || v != std::floor(v)) throw ArgumentError("scenario counts must be positive integers");
      point.scenarios = static_cast<std::size_t>(v);
    }
    for (Method m : methods) {
      auto rep = run_solve(doc, point, m, hours, opts);
      rep.axis = std::string(axis_name(axis));
      rep.value = v;
      out.push_back(std::move(rep));
    }
  }
  return out;
}

ReportSummary summarize(const RunReport& report) {
  std::vector<double> rel, obj, solves;
  for (const auto& r : report.records) {
    if (!r.ok) continue;
    if (r.relerr_pct) rel.push_back(*r.relerr_pct);
    obj.push_back(r.objective_kw);
    solves.push_back(static_cast<double>(r.opf_solves));
  }
  return {stat_of(rel), stat_of(obj), stat_of(solves)};
}

std::string to_csv(std::span<const RunReport> reports, bool summary_rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& rep : reports) {
    const std::string method = label(rep);
    for (const auto& r : rep.records) {
      os << r.hour << ',' << method << ',';
      if (r.ok) {
        os << num(r.objective_pu) << ',' << num(r.objective_kw, "%.6f") << ',' << format_branch_ids(r.opened) << ',';
        if (r.relerr_pct) os << num(*r.relerr_pct, "%.6f");
        os << ',' << r.opf_solves << ',';
      } else {
        os << ",,,,,";
      }
      if (r.ms) os << num(*r.ms, "%.3f");
      os << '\n';
    }
    if (!summary_rows) continue;
    const auto s = summarize(rep);
    const std::pair<const char*, double SummaryStat::*> rows[] = {
        {"mean", &SummaryStat::mean}, {"max", &SummaryStat::max}, {"min", &SummaryStat::min}};
    for (const auto& [name, field] : rows) {
      os << name << ',' << method << ",,";
      if (s.objective_kw.count) os << num(s.objective_kw.*field, "%.6f");
      os << ",,";
      if (s.relerr_pct.count) os << num(s.relerr_pct.*field, "%.6f");
      os << ',';
      if (s.opf_solves.count) os << num(s.opf_solves.*field, "%g");
      os << ",\n";
    }
  }
  return os.str();
}

std::string to_json(std::span<const RunReport> reports) {
  using json = nlohmann::ordered_json;
  json out = json::array();
  for (const auto& rep : reports) {
    json j;
    j["case"] = rep.case_name;
    j["method"] = method_name(rep.method);
    if (!rep.axis.empty()) {
      j["axis"] = rep.axis;
      j["value"] = rep.value;
    }
    json records = json::array();
    for (const auto& r : rep.records) {
      json jr;
      jr["hour"] = r.hour;
      jr["ok"] = r.ok;
      if (!r.ok) {
        jr["error"] = r.error;
      } else {
        jr["objective_pu"] = r.objective_pu;
        jr["objective_kw"] = r.objective_kw;
        jr["opened"] = r.opened;
        if (r.relerr_pct) jr["relerr_pct"] = *r.relerr_pct;
        jr["opf_solves"] = r.opf_solves;
        jr["sopf_solves"] = r.sopf_solves;
        if (!r.stage1_open.empty()) jr["stage1_open"] = r.stage1_open;
        json trace = json::array();
        for (const auto& ev : r.trace) {
          json je;
          je["stage"] = ev.stage;
          je["iteration"] = ev.iteration;
          je["branch"] = ev.branch;
          je["reason"] = reason_name(ev.reason);
          je["subpath"] = ev.subpath;
          je["feasible"] = ev.feasible;
          if (ev.feasible) {
            je["objective_pu"] = ev.objective;
            je["expected_loss_pu"] = ev.expected_loss;
          } else {
            je["failure"] = ev.failure;
          }
          trace.push_back(je);
        }
        jr["trace"] = trace;
        if (!r.notes.empty()) jr["notes"] = r.notes;
      }
      if (!r.oracle_note.empty()) jr["oracle_note"] = r.oracle_note;
      if (r.ms) jr["ms"] = *r.ms;
      records.push_back(jr);
    }
    j["records"] = records;
    const auto s = summarize(rep);
    auto put = [](const SummaryStat& st) {
      json x;
      x["count"] = st.count;
      if (st.count) {
        x["mean"] = st.mean;
        x["max"] = st.max;
        x["min"] = st.min;
      }
      return x;
    };
    j["summary"] = {{"relerr_pct", put(s.relerr_pct)}, {"objective_kw", put(s.objective_kw)},
                    {"opf_solves", put(s.opf_solves)}};
    out.push_back(j);
  }
  return out.dump(2) + "\n";
}

std::string to_long_csv(std::span<const RunReport> reports) {
  std::ostringstream os;
  os << "hour,method,axis,value,metric,metric_value\n";
  for (const auto& rep : reports) {
    const std::string value = rep.axis.empty() ? "" : num(rep.value, "%g");
    for (const auto& r : rep.records) {
      if (!r.ok) continue;
      auto row = [&](const char* metric, const std::string& v) {
        os << r.hour << ',' << method_name(rep.method) << ',' << rep.axis << ',' << value << ',' << metric << ','
           << v << '\n';
      };
      row("objective_kw", num(r.objective_kw, "%.6f"));
      if (r.relerr_pct) row("relerr_pct", num(*r.relerr_pct, "%.6f"));
      row("opf_solves", std::to_string(r.opf_solves));
      if (r.ms) row("ms", num(*r.ms, "%.3f"));
    }
  }
  return os.str();
}

int exit_code(std::span<const RunReport> reports) {
  for (const auto& rep : reports) {
    if (!rep.failed_hours().empty()) return 1;
  }
  return 0;
}

}  // namespace sdnr
