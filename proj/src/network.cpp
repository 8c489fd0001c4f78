#include "sdnr/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "sdnr/error.hpp"

namespace sdnr {

namespace {

void check_bus(const Bus& b) {
  if (!(b.v_min > 0.0) || !(b.v_min <= b.v_max)) {
    throw ArgumentError("bus " + std::to_string(b.id) + ": voltage bounds must satisfy 0 < v_min <= v_max");
  }
  if (!b.is_substation() && b.injection) {
    throw ArgumentError("bus " + std::to_string(b.id) + ": injection bounds are only allowed on substation buses");
  }
  if (b.is_substation() && !(b.v_set > 0.0)) {
    throw ArgumentError("bus " + std::to_string(b.id) + ": v_set must be positive");
  }
}

void check_branch(const Branch& br) {
  const auto tag = "branch " + std::to_string(br.id) + ": ";
  if (br.from == br.to) throw ArgumentError(tag + "from and to must differ");
  if (!(br.r >= 0.0) || !(br.x >= 0.0) || !(br.r + br.x > 0.0)) {
    throw ArgumentError(tag + "impedance must satisfy r >= 0, x >= 0, r + x > 0");
  }
  for (double lim : {br.s_max, br.p_max, br.q_max, br.i_max}) {
    if (!(lim > 0.0)) throw ArgumentError(tag + "flow limits must be positive");
  }
}

}  // namespace

Network::Network(std::vector<Bus> buses, std::vector<Branch> branches, double base_mva, double base_kv)
    : base_mva_(base_mva), base_kv_(base_kv) {
  if (!(base_mva > 0.0) || !(base_kv > 0.0)) throw ArgumentError("base power and voltage must be positive");
  if (buses.empty()) throw ArgumentError("network has no buses");

  std::set<int> seen;
  for (const auto& b : buses) {
    check_bus(b);
    if (!seen.insert(b.id).second) throw ArgumentError("duplicate bus id " + std::to_string(b.id));
  }
  std::sort(buses.begin(), buses.end(), [](const Bus& a, const Bus& b) { return a.id < b.id; });

  std::vector<int> subs;
  for (const auto& b : buses) {
    if (b.is_substation()) subs.push_back(b.id);
  }
  if (subs.empty()) throw ArgumentError("network has no substation bus");
  merged_substations_ = subs;
  const int virtual_id = subs.front();

  // Collapse every substation into the lowest-id one (zero-impedance merge).
  Bus merged = *std::find_if(buses.begin(), buses.end(), [&](const Bus& b) { return b.id == virtual_id; });
  InjectionLimits lim = merged.injection.value_or(InjectionLimits{});
  for (std::size_t k = 1; k < subs.size(); ++k) {
    const Bus& other = *std::find_if(buses.begin(), buses.end(), [&](const Bus& b) { return b.id == subs[k]; });
    const InjectionLimits o = other.injection.value_or(InjectionLimits{});
    lim.p_min += o.p_min;
    lim.p_max += o.p_max;
    lim.q_min += o.q_min;
    lim.q_max += o.q_max;
    merged.v_min = std::max(merged.v_min, other.v_min);
    merged.v_max = std::min(merged.v_max, other.v_max);
  }
  if (!(merged.v_min <= merged.v_max)) throw ArgumentError("merged substations have disjoint voltage bounds");
  merged.injection = lim;

  for (auto& b : buses) {
    if (b.id == virtual_id) {
      buses_.push_back(merged);
    } else if (!b.is_substation()) {
      buses_.push_back(b);
    }
  }
  for (std::size_t i = 0; i < buses_.size(); ++i) {
    bus_pos_[buses_[i].id] = i;
    if (buses_[i].id == virtual_id) substation_ = i;
  }
  for (int id : subs) bus_pos_[id] = substation_;

  const std::set<int> sub_set(subs.begin(), subs.end());
  std::set<int> branch_ids;
  for (auto& br : branches) {
    check_branch(br);
    if (!branch_ids.insert(br.id).second) throw ArgumentError("duplicate branch id " + std::to_string(br.id));
    for (int end : {br.from, br.to}) {
      if (!seen.count(end)) {
        throw ReferenceError("branch " + std::to_string(br.id) + " references unknown bus " + std::to_string(end));
      }
    }
    if (sub_set.count(br.from)) br.from = virtual_id;
    if (sub_set.count(br.to)) br.to = virtual_id;
    if (br.from == br.to) {
      dropped_branches_.push_back(br.id);
      continue;
    }
    branches_.push_back(br);
  }
  std::sort(branches_.begin(), branches_.end(), [](const Branch& a, const Branch& b) { return a.id < b.id; });

  incidence_.assign(buses_.size(), {});
  for (std::size_t e = 0; e < branches_.size(); ++e) {
    branch_pos_[branches_[e].id] = e;
    incidence_[bus_pos_.at(branches_[e].from)].push_back(e);
    incidence_[bus_pos_.at(branches_[e].to)].push_back(e);
  }
}

std::size_t Network::bus_index(int id) const {
  auto it = bus_pos_.find(id);
  if (it == bus_pos_.end()) throw ReferenceError("unknown bus id " + std::to_string(id));
  return it->second;
}

std::size_t Network::branch_index(int id) const {
  auto it = branch_pos_.find(id);
  if (it == branch_pos_.end()) throw ReferenceError("unknown branch id " + std::to_string(id));
  return it->second;
}

SwitchConfiguration SwitchConfiguration::all_closed(const Network& net) {
  std::map<int, SwitchState> status;
  for (const auto& br : net.branches()) status.emplace(br.id, SwitchState::closed);
  return SwitchConfiguration(std::move(status));
}

SwitchConfiguration SwitchConfiguration::with_open(const Network& net, std::span<const int> open_ids) {
  auto cfg = all_closed(net);
  for (int id : open_ids) {
    if (!net.has_branch(id)) throw ConfigurationMismatch("unknown branch id " + std::to_string(id));
    cfg.open(id);
  }
  return cfg;
}

bool SwitchConfiguration::is_closed(int branch_id) const {
  auto it = status_.find(branch_id);
  if (it == status_.end()) throw ConfigurationMismatch("no switch status for branch " + std::to_string(branch_id));
  return it->second == SwitchState::closed;
}

std::vector<int> SwitchConfiguration::open_branches() const {
  std::vector<int> out;
  for (const auto& [id, st] : status_) {
    if (st == SwitchState::open) out.push_back(id);
  }
  return out;
}

std::size_t SwitchConfiguration::closed_count() const {
  return static_cast<std::size_t>(std::count_if(status_.begin(), status_.end(),
                                                [](const auto& kv) { return kv.second == SwitchState::closed; }));
}

std::vector<std::uint8_t> SwitchConfiguration::closed_mask(const Network& net) const {
  std::vector<std::uint8_t> mask(net.branch_count(), 0);
  for (const auto& [id, st] : status_) {
    if (!net.has_branch(id)) throw ConfigurationMismatch("configuration names unknown branch " + std::to_string(id));
    mask[net.branch_index(id)] = st == SwitchState::closed ? 1 : 0;
  }
  if (status_.size() != net.branch_count()) {
    throw ConfigurationMismatch("configuration covers " + std::to_string(status_.size()) + " of " +
                                std::to_string(net.branch_count()) + " branches");
  }
  return mask;
}

std::string format_branch_ids(std::span<const int> ids, char sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) os << sep;
    os << ids[i];
  }
  return os.str();
}

}  // namespace sdnr
