#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "random_feeder.hpp"
#include "sdnr/error.hpp"
#include "sdnr/netgraph.hpp"

using namespace sdnr;
using testing::network_from_edges;

namespace {

SwitchConfiguration open_ids(const Network& net, std::vector<int> ids) {
  return SwitchConfiguration::with_open(net, ids);
}

// Independent cycle test: closed edges minus one edge stay connected iff that
// edge lies on a cycle.
bool connected_without(const Network& net, std::vector<std::uint8_t> mask, std::size_t skip) {
  mask[skip] = 0;
  std::vector<std::size_t> parent(net.bus_count());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
    return parent[a] == a ? a : parent[a] = find(parent[a]);
  };
  std::size_t comps = net.bus_count();
  for (std::size_t e = 0; e < mask.size(); ++e) {
    if (!mask[e]) continue;
    const auto a = find(net.bus_index(net.branches()[e].from));
    const auto b = find(net.bus_index(net.branches()[e].to));
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps == 1;
}

}  // namespace

TEST_CASE("radiality") {
  const auto net = network_from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(is_radial(net, open_ids(net, {3})));
  CHECK_FALSE(is_radial(net, open_ids(net, {})));
  const auto path = network_from_edges(3, {{0, 1}, {1, 2}});
  CHECK(is_radial(path, SwitchConfiguration::all_closed(path)));
  CHECK_FALSE(is_radial(path, open_ids(path, {2})));

  SwitchConfiguration bad = SwitchConfiguration::all_closed(path);
  bad.open(99);
  CHECK_THROWS_AS(is_radial(path, bad), ConfigurationMismatch);
}

TEST_CASE("loops are canonically oriented") {
  // Square 0-1-2-3 with branch 4 = (0,3).
  const auto net = network_from_edges(4, {{0, 1}, {2, 1}, {2, 3}, {0, 3}});
  const std::vector<int> ids{4, 2, 1, 3};
  const auto loop = Loop::from_branches(net, ids);
  CHECK(loop.buses() == std::vector<int>{0, 1, 2, 3, 0});
  REQUIRE(loop.size() == 4);
  CHECK(loop.branches()[0] == LoopBranch{1, 1});
  CHECK(loop.branches()[1] == LoopBranch{2, -1});
  CHECK(loop.branches()[2] == LoopBranch{3, 1});
  CHECK(loop.branches()[3] == LoopBranch{4, -1});
  CHECK(loop.bus_position(2) == 2);
  CHECK(loop.bus_position(9) == -1);
  CHECK(loop.branch_ids() == std::vector<int>{1, 2, 3, 4});

  const std::vector<int> not_cycle{1, 2, 3};
  CHECK_THROWS_AS(Loop::from_branches(net, not_cycle), TopologyError);
}

TEST_CASE("find_loops on small graphs") {
  const auto path = network_from_edges(3, {{0, 1}, {1, 2}});
  CHECK(find_loops(path).empty());

  const auto tri = network_from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  const auto loops = find_loops(tri);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].branch_ids() == std::vector<int>{1, 2, 3});

  const auto split = network_from_edges(4, {{0, 1}, {2, 3}});
  CHECK_THROWS_AS(find_loops(split), TopologyError);
}

TEST_CASE("fundamental cycles with a chord are reduced") {
  // Hexagon 0..5 plus chord (1,4); BFS tree puts both the chord and edge
  // (3,4) off-tree. Every returned loop must be chordless.
  const auto net = network_from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {1, 4}});
  const auto loops = find_loops(net);
  REQUIRE(loops.size() == 2);
  CHECK(cycle_space_rank(net, loops) == 2);
  for (const auto& loop : loops) {
    for (const auto& br : net.branches()) {
      if (loop.contains_branch(br.id)) continue;
      CHECK_FALSE((loop.contains_bus(br.from) && loop.contains_bus(br.to)));
    }
  }
}

TEST_CASE("Fig. 2 network has two loops sharing (3,7)") {
  const auto net = network_from_edges(
      10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 9}, {6, 8}, {7, 9}, {3, 7}, {7, 8}, {2, 5}, {5, 6}});
  const auto loops = find_loops(net);
  REQUIRE(loops.size() == 2);
  const int b37 = 8;
  CHECK(loops[0].contains_branch(b37));
  CHECK(loops[1].contains_branch(b37));

  const auto upd = update_loop_after_opening(net, loops, b37);
  CHECK_FALSE(upd.not_in_any_loop);
  REQUIRE(upd.loops.size() == 1);
  std::set<int> buses(upd.loops[0].buses().begin(), upd.loops[0].buses().end());
  CHECK(buses == std::set<int>{2, 3, 4, 9, 7, 8, 6, 5});
}

TEST_CASE("update_loop_after_opening corner cases") {
  // Two triangles joined at the substation.
  const auto net = network_from_edges(5, {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {3, 4}, {0, 4}});
  const auto loops = find_loops(net);
  REQUIRE(loops.size() == 2);
  const int in_first = loops[0].branches().front().branch;
  const auto upd = update_loop_after_opening(net, loops, in_first);
  REQUIRE(upd.loops.size() == 1);
  CHECK(upd.loops[0] == loops[1]);

  // Triangle plus pendant edge.
  const auto tri = network_from_edges(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}});
  const auto tl = find_loops(tri);
  CHECK(update_loop_after_opening(tri, tl, 1).loops.empty());
  const auto none = update_loop_after_opening(tri, tl, 4);
  CHECK(none.not_in_any_loop);
  CHECK(none.loops.size() == 1);
}

TEST_CASE("sub-path division") {
  const auto net = network_from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
  const auto loop = find_loops(net).front();
  CHECK(loop.buses() == std::vector<int>{0, 1, 2, 3, 4, 5, 0});

  const std::vector<int> two{3, 0};
  const auto parts = divide_into_subpaths(loop, two);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].start_bus == 0);
  CHECK(parts[0].end_bus == 3);
  CHECK(parts[0].branches.size() == 3);
  CHECK(parts[1].start_bus == 3);
  CHECK(parts[1].end_bus == 0);

  const std::vector<int> one{4};
  const auto whole = divide_into_subpaths(loop, one);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].branches.size() == 6);
  CHECK(whole[0].start_bus == 4);
  CHECK(whole[0].end_bus == 4);
  CHECK(whole[0].branches.front().branch == 5);

  const std::vector<int> none;
  CHECK_THROWS_AS(divide_into_subpaths(loop, none), ArgumentError);
  const std::vector<int> off{9};
  CHECK_THROWS_AS(divide_into_subpaths(loop, off), ArgumentError);
}

TEST_CASE("graph properties on random feeders") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    testing::FeederSpec spec;
    spec.min_buses = 5;
    spec.max_buses = 12;
    spec.loops = 1 + trial % 3;
    const auto inst = testing::random_feeder(rng, spec);
    const auto& net = inst.net;
    const auto loops = find_loops(net);
    REQUIRE(loops.size() == net.redundant_branch_count());
    CHECK(cycle_space_rank(net, loops) == loops.size());

    // Every loop branch lies on a cycle of the all-closed graph.
    const std::vector<std::uint8_t> all(net.branch_count(), 1);
    for (const auto& loop : loops) {
      for (const auto& lb : loop.branches()) CHECK(connected_without(net, all, net.branch_index(lb.branch)));
    }

    // Any choice of one opening per successively updated loop is radial.
    std::function<void(std::vector<Loop>, std::vector<int>)> explore = [&](std::vector<Loop> pending,
                                                                        std::vector<int> opened) {
      if (pending.empty()) {
        const auto cfg = SwitchConfiguration::with_open(net, opened);
        CHECK(is_radial(net, cfg));
        CHECK(cfg.closed_count() + 1 == net.bus_count());
        return;
      }
      for (const auto& lb : pending.front().branches()) {
        auto next = update_loop_after_opening(net, pending, lb.branch);
        CHECK(next.loops.size() + 1 == pending.size());
        auto o = opened;
        o.push_back(lb.branch);
        explore(next.loops, o);
      }
    };
    if (loops.size() <= 3) explore(loops, {});

    // Sub-paths partition the loop.
    for (const auto& loop : loops) {
      std::vector<int> picks;
      for (std::size_t k = 0; k + 1 < loop.buses().size(); k += 2) picks.push_back(loop.buses()[k]);
      const auto parts = divide_into_subpaths(loop, picks);
      CHECK(parts.size() == picks.size());
      std::multiset<int> covered;
      for (const auto& p : parts) {
        CHECK_FALSE(p.branches.empty());
        for (const auto& lb : p.branches) covered.insert(lb.branch);
      }
      const auto ids = loop.branch_ids();
      CHECK(covered == std::multiset<int>(ids.begin(), ids.end()));
    }
  }
}
