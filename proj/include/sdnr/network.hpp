#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sdnr {

inline constexpr double kUnlimited = std::numeric_limits<double>::infinity();

enum class BusKind { substation, non_substation };

struct InjectionLimits {
  double p_min = -kUnlimited;
  double p_max = kUnlimited;
  double q_min = -kUnlimited;
  double q_max = kUnlimited;
};

/// A bus of the feeder. Voltages are magnitudes in per-unit; `v_set` is the
/// regulated magnitude at a substation and is ignored elsewhere.
struct Bus {
  int id = 0;
  BusKind kind = BusKind::non_substation;
  double v_min = 0.9;
  double v_max = 1.1;
  std::optional<InjectionLimits> injection;  // substation buses only
  double v_set = 1.0;

  bool is_substation() const { return kind == BusKind::substation; }
};

/// A switched line. `from`/`to` fix the reference direction of flows.
struct Branch {
  int id = 0;
  int from = 0;
  int to = 0;
  double r = 0.0;
  double x = 0.0;
  double s_max = kUnlimited;
  double p_max = kUnlimited;
  double q_max = kUnlimited;
  double i_max = kUnlimited;
  bool switchable = true;

  int other(int bus) const { return bus == from ? to : from; }
};

/// Immutable feeder model with exactly one (possibly merged) substation bus.
///
/// Buses and branches are kept sorted by id; the position of an element in
/// `buses()` / `branches()` is its dense index, used by every solver array.
/// Multiple substation buses are collapsed into the lowest-id one at
/// construction; branches that end up joining the substation to itself are
/// dropped and listed in `dropped_branches()`.
class Network {
 public:
  Network(std::vector<Bus> buses, std::vector<Branch> branches, double base_mva = 1.0,
          double base_kv = 1.0);

  std::span<const Bus> buses() const { return buses_; }
  std::span<const Branch> branches() const { return branches_; }
  std::size_t bus_count() const { return buses_.size(); }
  std::size_t branch_count() const { return branches_.size(); }

  double base_mva() const { return base_mva_; }
  double base_kv() const { return base_kv_; }

  /// Dense index of a bus id; merged substation ids resolve to the virtual bus.
  std::size_t bus_index(int id) const;
  std::size_t branch_index(int id) const;
  bool has_branch(int id) const { return branch_pos_.count(id) != 0; }

  const Bus& bus(int id) const { return buses_[bus_index(id)]; }
  const Branch& branch(int id) const { return branches_[branch_index(id)]; }

  std::size_t substation_index() const { return substation_; }
  int substation_id() const { return buses_[substation_].id; }
  /// Original ids of all substation buses folded into the virtual one.
  const std::vector<int>& merged_substations() const { return merged_substations_; }
  const std::vector<int>& dropped_branches() const { return dropped_branches_; }

  /// Branch indices incident to the bus at dense index `bus`.
  std::span<const std::size_t> incident(std::size_t bus) const { return incidence_[bus]; }

  /// |E| - |N| + 1, the number of independent loops when every branch is closed.
  std::size_t redundant_branch_count() const {
    return branches_.size() + 1 - buses_.size();
  }

 private:
  std::vector<Bus> buses_;
  std::vector<Branch> branches_;
  double base_mva_;
  double base_kv_;
  std::size_t substation_ = 0;
  std::vector<int> merged_substations_;
  std::vector<int> dropped_branches_;
  std::map<int, std::size_t> bus_pos_;
  std::map<int, std::size_t> branch_pos_;
  std::vector<std::vector<std::size_t>> incidence_;
};

enum class SwitchState : std::uint8_t { open, closed };

/// Open/closed status per branch id.
class SwitchConfiguration {
 public:
  SwitchConfiguration() = default;
  explicit SwitchConfiguration(std::map<int, SwitchState> status) : status_(std::move(status)) {}

  static SwitchConfiguration all_closed(const Network& net);
  static SwitchConfiguration with_open(const Network& net, std::span<const int> open_ids);

  const std::map<int, SwitchState>& status() const { return status_; }
  bool is_closed(int branch_id) const;
  void set(int branch_id, SwitchState state) { status_[branch_id] = state; }
  void open(int branch_id) { set(branch_id, SwitchState::open); }
  void close(int branch_id) { set(branch_id, SwitchState::closed); }

  std::vector<int> open_branches() const;
  std::size_t closed_count() const;

  /// One byte per branch index (1 = closed). Throws ConfigurationMismatch when
  /// the configuration does not cover exactly the branches of `net`.
  std::vector<std::uint8_t> closed_mask(const Network& net) const;

  bool operator==(const SwitchConfiguration&) const = default;

 private:
  std::map<int, SwitchState> status_;
};

std::string format_branch_ids(std::span<const int> ids, char sep = ';');

}  // namespace sdnr
