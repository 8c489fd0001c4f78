#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sdnr/network.hpp"

namespace sdnr {

/// A branch as traversed around a loop: +1 when the traversal agrees with the
/// branch reference direction (from -> to), -1 otherwise.
struct LoopBranch {
  int branch = 0;
  int orientation = 1;

  bool operator==(const LoopBranch&) const = default;
};

/// A simple cycle in canonical traversal order.
///
/// Traversal starts at the lowest-id bus and leaves towards the lower-id of its
/// two loop neighbours (lower branch id on a tie). `buses()` is closed: the
/// first and last entries coincide and `branches()[k]` joins `buses()[k]` to
/// `buses()[k + 1]`.
class Loop {
 public:
  /// Orders an unordered set of branch ids into a Loop. Throws TopologyError
  /// when the set is not a single simple cycle.
  static Loop from_branches(const Network& net, std::span<const int> branch_ids);

  const std::vector<LoopBranch>& branches() const { return branches_; }
  const std::vector<int>& buses() const { return buses_; }
  std::size_t size() const { return branches_.size(); }

  bool contains_branch(int id) const;
  bool contains_bus(int id) const;
  /// Position of a bus in the traversal (0 .. size()-1), or -1.
  int bus_position(int id) const;
  std::vector<int> branch_ids() const;  // sorted ascending

  bool operator==(const Loop&) const = default;

 private:
  std::vector<LoopBranch> branches_;
  std::vector<int> buses_;
};

/// A contiguous stretch of a loop between two injecting buses.
struct SubPath {
  std::vector<LoopBranch> branches;  // in loop traversal order
  int start_bus = 0;
  int end_bus = 0;

  bool contains_branch(int id) const;
};

/// True iff the closed branches form a spanning tree rooted at the substation.
bool is_radial(const Network& net, const SwitchConfiguration& cfg);

/// Independent chordless loops of the all-closed network, one per non-tree
/// branch of a BFS tree rooted at the substation, ordered by that branch id.
std::vector<Loop> find_loops(const Network& net);

/// Simple cycles of the closed subgraph of `closed_mask`, one per non-tree
/// branch of a BFS tree (no chordless reduction). Throws TopologyError when
/// some bus is not connected to the substation.
std::vector<Loop> fundamental_loops(const Network& net, std::span<const std::uint8_t> closed_mask);

struct LoopUpdate {
  std::vector<Loop> loops;
  /// Set when the opened branch lay in no loop; `loops` is then unchanged.
  bool not_in_any_loop = false;
};

/// Drops the first loop containing `opened`; every other loop that contains it
/// is replaced by its symmetric difference with the dropped one.
LoopUpdate update_loop_after_opening(const Network& net, std::span<const Loop> loops, int opened);

/// Splits a loop at the given buses. With a single bus the whole loop, read
/// from that bus, is returned as one sub-path.
std::vector<SubPath> divide_into_subpaths(const Loop& loop, std::span<const int> injecting_buses);

/// Rank over GF(2) of the branch-incidence vectors of `loops`.
std::size_t cycle_space_rank(const Network& net, std::span<const Loop> loops);

}  // namespace sdnr
