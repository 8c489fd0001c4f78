// Command-line driver: solve, sweep, oracle, cluster, validate.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sdnr/case_io.hpp"
#include "sdnr/experiment.hpp"
#include "sdnr/netgraph.hpp"
#include "sdnr/sbr.hpp"
#include "sdnr/trees.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kSolveFailure = 1;
constexpr int kInputError = 2;

std::vector<int> parse_hours(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoi(part));
      } else {
        const int a = std::stoi(part.substr(0, dash)), b = std::stoi(part.substr(dash + 1));
        for (int h = a; h <= b; ++h) out.push_back(h);
      }
    } catch (const std::exception&) {
      throw sdnr::ArgumentError("bad hour list \"" + spec + "\"");
    }
  }
  for (int h : out) {
    if (h < 0 || h > 23) throw sdnr::ArgumentError("hours must lie in 0..23");
  }
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sdnr::DataError("cannot write " + path);
  out << text;
}

std::string render(std::span<const sdnr::RunReport> reports, const std::string& format, bool summary) {
  if (format == "json") return sdnr::to_json(reports);
  if (format == "long") return sdnr::to_long_csv(reports);
  return sdnr::to_csv(reports, summary);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic distribution network reconfiguration"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  double tolerance = 1e-8;
  std::uint64_t budget = 100000;
  std::string format = "csv";
  std::size_t jobs = 1;
  bool no_timing = false;
  std::string output;
  app.add_option("--seed", seed, "Seed for profiles and clustering")->capture_default_str();
  app.add_option("--tolerance", tolerance, "Power-flow mismatch tolerance (pu)")->capture_default_str();
  app.add_option("--budget", budget, "Largest tree count the oracle will enumerate")->capture_default_str();
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json", "long"}))->capture_default_str();
  app.add_option("--jobs", jobs, "Hours evaluated concurrently")->capture_default_str();
  app.add_flag("--no-timing", no_timing, "Leave wall-time columns blank");
  app.add_option("-o,--output", output, "Write the report here instead of stdout");

  sdnr::ScenarioSource src;
  std::string profiles;
  std::string hours_spec = "0-23";
  bool compare_oracle = false;
  std::string case_path;
  auto scenario_options = [&](CLI::App* sub) {
    sub->add_option("case", case_path, "Case file (.json or MATPOWER .m)")->required()->check(CLI::ExistingFile);
    sub->add_option("--profiles", profiles, "Hourly CSV (synthetic profiles when omitted)");
    sub->add_option("--load-col", src.columns.load)->capture_default_str();
    sub->add_option("--wind-col", src.columns.wind)->capture_default_str();
    sub->add_option("--solar-col", src.columns.solar)->capture_default_str();
    sub->add_option("--days", src.days, "Days of synthetic profiles")->capture_default_str();
    sub->add_option("--scenarios", src.scenarios, "Scenarios per hour (k-medoids k)")->capture_default_str();
    sub->add_option("--kr", src.renewable_scale, "Renewable capacity scaling")->capture_default_str();
    sub->add_option("--pf-load", src.power_factors.load)->capture_default_str();
    sub->add_option("--pf-renewable", src.power_factors.renewable)->capture_default_str();
    sub->add_option("--hours", hours_spec, "Hours, e.g. 0-23 or 8,12,18")->capture_default_str();
  };

  auto* solve = app.add_subcommand("solve", "Reconfigure each hour with one method");
  scenario_options(solve);
  std::string method = "proposed";
  solve->add_option("--method", method)->check(CLI::IsMember({"proposed", "baseline", "oracle"}))->capture_default_str();
  solve->add_flag("--compare-oracle", compare_oracle, "Also run the oracle and report relative errors");

  auto* sweep = app.add_subcommand("sweep", "Grid over renewable scaling or scenario count");
  scenario_options(sweep);
  std::string axis = "kr";
  std::vector<double> values;
  std::vector<std::string> methods{"proposed", "baseline"};
  sweep->add_option("--axis", axis)->check(CLI::IsMember({"kr", "scenarios"}))->capture_default_str();
  sweep->add_option("--values", values, "Grid values")->delimiter(',')->required();
  sweep->add_option("--methods", methods)->delimiter(',')->capture_default_str();
  sweep->add_flag("--compare-oracle", compare_oracle, "Report relative errors against the oracle");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive search over radial configurations");
  scenario_options(oracle);
  bool count_only = false;
  oracle->add_flag("--count-only", count_only, "Print the radial configuration count and stop");

  auto* cluster = app.add_subcommand("cluster", "Reduce one hour of profiles to k scenarios");
  int cluster_hour = 12;
  cluster->add_option("--profiles", profiles, "Hourly CSV (synthetic profiles when omitted)");
  cluster->add_option("--load-col", src.columns.load)->capture_default_str();
  cluster->add_option("--wind-col", src.columns.wind)->capture_default_str();
  cluster->add_option("--solar-col", src.columns.solar)->capture_default_str();
  cluster->add_option("--days", src.days)->capture_default_str();
  cluster->add_option("--scenarios", src.scenarios)->capture_default_str();
  cluster->add_option("--hour", cluster_hour)->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Check a case file and print its structure");
  validate->add_option("case", case_path)->required()->check(CLI::ExistingFile);
  bool reserialize = false;
  validate->add_flag("--canonical", reserialize, "Print the canonical JSON form instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  src.seed = seed;
  if (!profiles.empty()) src.csv = profiles;
  sdnr::RunOptions opts;
  opts.solver.tolerance = tolerance;
  opts.budget = budget;
  opts.jobs = jobs;
  opts.compare_oracle = compare_oracle;
  opts.record_timing = !no_timing;

  // Input problems exit 2 before any solve starts.
  sdnr::CaseDocument doc;
  std::vector<int> hours;
  try {
    if (!case_path.empty()) {
      doc = sdnr::parse_case(case_path);
      (void)doc.network();
    }
    hours = parse_hours(hours_spec);
    if (!profiles.empty()) (void)sdnr::load_profiles(src);
  } catch (const sdnr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (*validate) {
      if (reserialize) {
        emit(sdnr::serialize_case(doc), output);
        return kOk;
      }
      const auto net = doc.network();
      const auto cfg = doc.initial_configuration(net);
      std::ostringstream os;
      os << "case: " << (doc.name.empty() ? case_path : doc.name) << '\n'
         << "buses: " << doc.buses.size() << '\n'
         << "branches: " << doc.branches.size() << '\n'
         << "open ties: " << doc.open_branches.size() << '\n'
         << "redundant branches: " << net.redundant_branch_count() << '\n'
         << "loops: " << sdnr::find_loops(net).size() << '\n'
         << "initial configuration radial: " << (sdnr::is_radial(net, cfg) ? "yes" : "no") << '\n'
         << "radial configurations: " << sdnr::count_spanning_trees(net).str() << '\n';
      emit(os.str(), output);
      return kOk;
    }
    if (*cluster) {
      const auto table = sdnr::rows_for_hour(sdnr::load_profiles(src), cluster_hour);
      const auto res = sdnr::reduce_kmedoids(table, src.scenarios, seed);
      std::ostringstream os;
      os << "scenario,row,load,wind,solar,probability\n";
      for (std::size_t k = 0; k < res.factors.size(); ++k) {
        const auto& f = res.factors[k];
        char line[160];
        std::snprintf(line, sizeof line, "%zu,%zu,%.6f,%.6f,%.6f,%.12g\n", k, f.medoid_row, f.load, f.wind, f.solar,
                      f.probability);
        os << line;
      }
      emit(os.str(), output);
      return kOk;
    }
    if (*oracle && count_only) {
      emit(sdnr::count_spanning_trees(doc.network()).str() + "\n", output);
      return kOk;
    }
    std::vector<sdnr::RunReport> reports;
    if (*solve || *oracle) {
      const auto m = *oracle ? sdnr::Method::oracle : sdnr::parse_method(method);
      reports.push_back(sdnr::run_solve(doc, src, m, hours, opts));
    } else {
      std::vector<sdnr::Method> ms;
      for (const auto& name : methods) ms.push_back(sdnr::parse_method(name));
      const auto ax = axis == "kr" ? sdnr::SweepAxis::renewable_scale : sdnr::SweepAxis::scenario_count;
      reports = sdnr::run_sweep(doc, src, ax, values, ms, hours, opts);
    }
    emit(render(reports, format, bool(*sweep)), output);
    for (const auto& rep : reports) {
      for (const auto& r : rep.records) {
        if (!r.ok) std::cerr << "hour " << r.hour << " (" << sdnr::method_name(rep.method) << "): " << r.error << '\n';
      }
    }
    return sdnr::exit_code(reports) == 0 ? kOk : kSolveFailure;
  } catch (const sdnr::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const sdnr::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const sdnr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolveFailure;
  }
}
