#include "sdnr/netgraph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "sdnr/error.hpp"

namespace sdnr {

namespace {

/// Branch-incidence vector over GF(2).
class EdgeBits {
 public:
  explicit EdgeBits(std::size_t n) : words_((n + 63) / 64, 0) {}
  void flip(std::size_t i) { words_[i / 64] ^= (std::uint64_t{1} << (i % 64)); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  EdgeBits& operator^=(const EdgeBits& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] ^= o.words_[k];
    return *this;
  }
  bool any() const {
    return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
  }
  std::size_t lowest() const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      if (words_[k]) return k * 64 + static_cast<std::size_t>(__builtin_ctzll(words_[k]));
    }
    return words_.size() * 64;
  }

 private:
  std::vector<std::uint64_t> words_;
};

EdgeBits bits_of(const Network& net, const Loop& loop) {
  EdgeBits b(net.branch_count());
  for (const auto& lb : loop.branches()) b.flip(net.branch_index(lb.branch));
  return b;
}

std::size_t gf2_rank(std::vector<EdgeBits> rows) {
  std::size_t rank = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].any()) continue;
    const std::size_t pivot = rows[i].lowest();
    ++rank;
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      if (rows[j].test(pivot)) rows[j] ^= rows[i];
    }
  }
  return rank;
}

bool independent(const Network& net, std::span<const Loop> loops) {
  std::vector<EdgeBits> rows;
  rows.reserve(loops.size());
  for (const auto& l : loops) rows.push_back(bits_of(net, l));
  return gf2_rank(std::move(rows)) == loops.size();
}

struct SpanningTree {
  std::vector<std::ptrdiff_t> parent_branch;  // branch index, -1 at root/unreached
  std::vector<std::size_t> parent;
  std::vector<std::size_t> depth;
  std::vector<bool> reached;
  std::vector<std::uint8_t> in_tree;  // per branch index
};

/// BFS from the substation over closed branches, visiting neighbours in
/// ascending (bus id, branch id) order.
SpanningTree bfs_tree(const Network& net, std::span<const std::uint8_t> closed) {
  const std::size_t n = net.bus_count();
  SpanningTree t;
  t.parent_branch.assign(n, -1);
  t.parent.assign(n, 0);
  t.depth.assign(n, 0);
  t.reached.assign(n, false);
  t.in_tree.assign(net.branch_count(), 0);

  const auto branches = net.branches();
  std::deque<std::size_t> queue{net.substation_index()};
  t.reached[net.substation_index()] = true;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    std::vector<std::pair<std::size_t, std::size_t>> nbrs;  // (bus index, branch index)
    for (std::size_t e : net.incident(u)) {
      if (!closed[e]) continue;
      nbrs.emplace_back(net.bus_index(branches[e].other(net.buses()[u].id)), e);
    }
    std::sort(nbrs.begin(), nbrs.end());
    for (auto [v, e] : nbrs) {
      if (t.reached[v]) continue;
      t.reached[v] = true;
      t.parent[v] = u;
      t.parent_branch[v] = static_cast<std::ptrdiff_t>(e);
      t.depth[v] = t.depth[u] + 1;
      t.in_tree[e] = 1;
      queue.push_back(v);
    }
  }
  return t;
}

Loop tree_cycle(const Network& net, const SpanningTree& t, std::size_t edge) {
  const auto& br = net.branches()[edge];
  std::size_t a = net.bus_index(br.from);
  std::size_t b = net.bus_index(br.to);
  std::vector<int> ids{br.id};
  while (a != b) {
    if (t.depth[a] >= t.depth[b]) {
      ids.push_back(net.branches()[static_cast<std::size_t>(t.parent_branch[a])].id);
      a = t.parent[a];
    } else {
      ids.push_back(net.branches()[static_cast<std::size_t>(t.parent_branch[b])].id);
      b = t.parent[b];
    }
  }
  return Loop::from_branches(net, ids);
}

/// Repeatedly splits the cycle on its lowest-id chord, keeping the half that
/// contains `generator`.
Loop chordless(const Network& net, Loop loop, int generator) {
  for (;;) {
    const std::size_t n = loop.size();
    const Branch* chord = nullptr;
    int pa = 0;
    int pb = 0;
    for (const auto& br : net.branches()) {
      if (loop.contains_branch(br.id)) continue;
      const int p = loop.bus_position(br.from);
      const int q = loop.bus_position(br.to);
      if (p < 0 || q < 0) continue;
      const int gap = std::abs(p - q);
      if (gap == 1 || gap == static_cast<int>(n) - 1) continue;
      chord = &br;
      pa = std::min(p, q);
      pb = std::max(p, q);
      break;  // branches are sorted by id
    }
    if (!chord) return loop;
    std::vector<int> inner{chord->id};
    std::vector<int> outer{chord->id};
    bool inner_has_gen = false;
    for (int k = 0; k < static_cast<int>(n); ++k) {
      const int id = loop.branches()[static_cast<std::size_t>(k)].branch;
      if (k >= pa && k < pb) {
        inner.push_back(id);
        inner_has_gen = inner_has_gen || id == generator;
      } else {
        outer.push_back(id);
      }
    }
    loop = Loop::from_branches(net, inner_has_gen ? inner : outer);
  }
}

/// Splits an even-degree branch set into edge-disjoint simple cycles.
std::vector<std::vector<int>> decompose_cycles(const Network& net, std::vector<int> ids) {
  std::vector<std::vector<int>> out;
  std::set<int> remaining(ids.begin(), ids.end());
  while (!remaining.empty()) {
    const Branch& first = net.branch(*remaining.begin());
    std::vector<int> path_buses{first.from};
    std::vector<int> path_edges;
    int cur = first.from;
    for (;;) {
      int next_edge = -1;
      for (int id : remaining) {
        const Branch& br = net.branch(id);
        if ((br.from == cur || br.to == cur) &&
            std::find(path_edges.begin(), path_edges.end(), id) == path_edges.end()) {
          next_edge = id;
          break;
        }
      }
      if (next_edge < 0) throw TopologyError("branch set is not a union of cycles");
      path_edges.push_back(next_edge);
      cur = net.branch(next_edge).other(cur);
      auto it = std::find(path_buses.begin(), path_buses.end(), cur);
      if (it != path_buses.end()) {
        const auto start = static_cast<std::size_t>(it - path_buses.begin());
        std::vector<int> cyc(path_edges.begin() + static_cast<std::ptrdiff_t>(start), path_edges.end());
        for (int id : cyc) remaining.erase(id);
        out.push_back(std::move(cyc));
        break;
      }
      path_buses.push_back(cur);
    }
  }
  return out;
}

}  // namespace

Loop Loop::from_branches(const Network& net, std::span<const int> branch_ids) {
  if (branch_ids.empty()) throw TopologyError("empty loop");
  std::set<int> ids(branch_ids.begin(), branch_ids.end());
  if (ids.size() != branch_ids.size()) throw TopologyError("loop lists a branch twice");
  std::map<int, std::vector<int>> at_bus;  // bus id -> incident loop branch ids (ascending)
  for (int id : ids) {
    const Branch& br = net.branch(id);
    at_bus[br.from].push_back(id);
    at_bus[br.to].push_back(id);
  }
  for (const auto& [bus, inc] : at_bus) {
    if (inc.size() != 2) throw TopologyError("branch set is not a simple cycle (bus " + std::to_string(bus) + ")");
  }

  const int start = at_bus.begin()->first;
  const auto& inc = at_bus.begin()->second;
  auto key = [&](int id) { return std::make_pair(net.branch(id).other(start), id); };
  int edge = key(inc[0]) <= key(inc[1]) ? inc[0] : inc[1];

  Loop loop;
  int cur = start;
  loop.buses_.push_back(cur);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const Branch& br = net.branch(edge);
    loop.branches_.push_back({edge, br.from == cur ? 1 : -1});
    cur = br.other(cur);
    loop.buses_.push_back(cur);
    const auto& here = at_bus.at(cur);
    edge = here[0] == edge ? here[1] : here[0];
  }
  if (cur != start) throw TopologyError("branch set is not a single cycle");
  return loop;
}

bool Loop::contains_branch(int id) const {
  return std::any_of(branches_.begin(), branches_.end(), [id](const LoopBranch& b) { return b.branch == id; });
}

bool Loop::contains_bus(int id) const { return bus_position(id) >= 0; }

int Loop::bus_position(int id) const {
  for (std::size_t k = 0; k + 1 < buses_.size(); ++k) {
    if (buses_[k] == id) return static_cast<int>(k);
  }
  return -1;
}

std::vector<int> Loop::branch_ids() const {
  std::vector<int> out;
  for (const auto& b : branches_) out.push_back(b.branch);
  std::sort(out.begin(), out.end());
  return out;
}

bool SubPath::contains_branch(int id) const {
  return std::any_of(branches.begin(), branches.end(), [id](const LoopBranch& b) { return b.branch == id; });
}

bool is_radial(const Network& net, const SwitchConfiguration& cfg) {
  const auto closed = cfg.closed_mask(net);
  std::vector<std::size_t> parent(net.bus_count());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::size_t count = 0;
  for (std::size_t e = 0; e < net.branch_count(); ++e) {
    if (!closed[e]) continue;
    const auto& br = net.branches()[e];
    const std::size_t a = find(net.bus_index(br.from));
    const std::size_t b = find(net.bus_index(br.to));
    if (a == b) return false;
    parent[a] = b;
    ++count;
  }
  return count + 1 == net.bus_count();
}

std::vector<Loop> fundamental_loops(const Network& net, std::span<const std::uint8_t> closed_mask) {
  const auto tree = bfs_tree(net, closed_mask);
  for (std::size_t i = 0; i < net.bus_count(); ++i) {
    if (!tree.reached[i]) {
      throw TopologyError("bus " + std::to_string(net.buses()[i].id) + " is not connected to the substation");
    }
  }
  std::vector<Loop> loops;
  for (std::size_t e = 0; e < net.branch_count(); ++e) {
    if (closed_mask[e] && !tree.in_tree[e]) loops.push_back(tree_cycle(net, tree, e));
  }
  return loops;
}

std::vector<Loop> find_loops(const Network& net) {
  const std::vector<std::uint8_t> all(net.branch_count(), 1);
  std::vector<Loop> basis = fundamental_loops(net, all);

  // Reduce each cycle to chordless form unless that would break independence
  // of the accepted loops together with the not-yet-processed fundamental ones.
  std::vector<Loop> out = basis;
  const auto tree = bfs_tree(net, all);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    int generator = 0;
    for (const auto& lb : basis[i].branches()) {
      if (!tree.in_tree[net.branch_index(lb.branch)]) generator = std::max(generator, lb.branch);
    }
    Loop reduced = chordless(net, basis[i], generator);
    if (reduced == basis[i]) continue;
    std::vector<Loop> trial = out;
    trial[i] = reduced;
    if (independent(net, trial)) out[i] = std::move(reduced);
  }
  return out;
}

LoopUpdate update_loop_after_opening(const Network& net, std::span<const Loop> loops, int opened) {
  LoopUpdate result;
  auto first = std::find_if(loops.begin(), loops.end(), [&](const Loop& l) { return l.contains_branch(opened); });
  if (first == loops.end()) {
    result.loops.assign(loops.begin(), loops.end());
    result.not_in_any_loop = true;
    return result;
  }
  const auto dropped = bits_of(net, *first);
  for (auto it = loops.begin(); it != loops.end(); ++it) {
    if (it == first) continue;
    if (!it->contains_branch(opened)) {
      result.loops.push_back(*it);
      continue;
    }
    auto merged = bits_of(net, *it);
    merged ^= dropped;
    std::vector<int> ids;
    for (std::size_t e = 0; e < net.branch_count(); ++e) {
      if (merged.test(e)) ids.push_back(net.branches()[e].id);
    }
    // The symmetric difference is usually one larger cycle; when the two
    // loops share several disjoint stretches it is a union of cycles, and we
    // keep the first piece that leaves the loop set independent.
    const auto pieces = decompose_cycles(net, ids);
    bool placed = false;
    for (const auto& piece : pieces) {
      Loop candidate = Loop::from_branches(net, piece);
      std::vector<Loop> trial = result.loops;
      trial.push_back(candidate);
      for (auto rest = std::next(it); rest != loops.end(); ++rest) {
        if (rest != first) trial.push_back(*rest);
      }
      if (independent(net, trial)) {
        result.loops.push_back(std::move(candidate));
        placed = true;
        break;
      }
    }
    if (!placed) throw TopologyError("could not rebuild an independent loop after opening branch " +
                                     std::to_string(opened));
  }
  return result;
}

std::vector<SubPath> divide_into_subpaths(const Loop& loop, std::span<const int> injecting_buses) {
  if (injecting_buses.empty()) throw ArgumentError("at least one injecting bus is required");
  std::vector<int> positions;
  for (int bus : injecting_buses) {
    const int p = loop.bus_position(bus);
    if (p < 0) throw ArgumentError("injecting bus " + std::to_string(bus) + " is not on the loop");
    positions.push_back(p);
  }
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());

  const std::size_t n = loop.size();
  std::vector<SubPath> out;
  for (std::size_t m = 0; m < positions.size(); ++m) {
    const auto start = static_cast<std::size_t>(positions[m]);
    const std::size_t end = m + 1 < positions.size() ? static_cast<std::size_t>(positions[m + 1])
                                                     : static_cast<std::size_t>(positions[0]) + n;
    SubPath sp;
    sp.start_bus = loop.buses()[start];
    sp.end_bus = loop.buses()[end % n];
    for (std::size_t k = start; k < end; ++k) sp.branches.push_back(loop.branches()[k % n]);
    out.push_back(std::move(sp));
  }
  return out;
}

std::size_t cycle_space_rank(const Network& net, std::span<const Loop> loops) {
  std::vector<EdgeBits> rows;
  for (const auto& l : loops) rows.push_back(bits_of(net, l));
  return gf2_rank(std::move(rows));
}

}  // namespace sdnr
