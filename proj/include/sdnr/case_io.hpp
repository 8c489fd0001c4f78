#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sdnr/network.hpp"
#include "sdnr/scenarios.hpp"

namespace sdnr {

/// A feeder as stored on disk: raw buses and branches (before substation
/// merging), initially open tie branches, and per-bus profile assignments.
struct CaseDocument {
  std::string name;
  std::string notes;
  double base_mva = 1.0;
  double base_kv = 1.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::set<int> open_branches;
  std::map<int, BusProfile> profiles;
  std::string source_format = "sdnr-case/1";

  Network network() const;
  /// Ties open, everything else closed.
  SwitchConfiguration initial_configuration(const Network& net) const;
};

/// Dispatches on the extension: `.m` is read as MATPOWER, anything else as JSON.
CaseDocument parse_case(const std::filesystem::path& path);
CaseDocument parse_case_json(std::string_view text);
CaseDocument parse_matpower(std::string_view text);

/// Canonical JSON text (two-space indent, trailing newline). Defaults and
/// unlimited bounds are omitted, so parse -> serialize is byte-stable.
std::string serialize_case(const CaseDocument& doc);

}  // namespace sdnr
