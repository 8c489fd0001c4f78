#include "sdnr/trees.hpp"

#include <algorithm>
#include <numeric>

#include "sdnr/error.hpp"

namespace sdnr {

namespace {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
  std::vector<std::size_t> parent;
};

/// Union-find without path compression so unions can be undone in LIFO order.
class RollbackUnionFind {
 public:
  explicit RollbackUnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t a) const {
    while (parent_[a] != a) a = parent_[a];
    return a;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] > size_[b]) std::swap(a, b);
    parent_[a] = b;
    size_[b] += size_[a];
    history_.push_back(a);
    return true;
  }
  void undo() {
    const std::size_t a = history_.back();
    history_.pop_back();
    const std::size_t b = parent_[a];
    size_[b] -= size_[a];
    parent_[a] = a;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> history_;
};

class TreeEnumerator {
 public:
  TreeEnumerator(const Network& net, const std::function<void(std::span<const std::uint8_t>)>& visit)
      : net_(net),
        visit_(visit),
        uf_(net.bus_count()),
        mask_(net.branch_count(), 0),
        free_pos_(net.branch_count(), 0) {}

  std::uint64_t run() {
    const std::size_t n = net_.bus_count();
    for (std::size_t e = 0; e < net_.branch_count(); ++e) {
      const auto& br = net_.branches()[e];
      if (br.switchable) {
        free_pos_[e] = free_.size();
        free_.push_back(e);
        continue;
      }
      if (!uf_.unite(net_.bus_index(br.from), net_.bus_index(br.to))) return 0;  // forced cycle
      mask_[e] = 1;
      ++included_;
    }
    if (included_ + 1 > n) return 0;
    recurse(0);
    return count_;
  }

 private:
  bool still_connectable(std::size_t from) const {
    // Included branches plus every undecided branch must still span all buses.
    UnionFind uf(net_.bus_count());
    std::size_t joins = 0;
    for (std::size_t e = 0; e < net_.branch_count(); ++e) {
      if (!mask_[e] && free_pos_[e] < from) continue;
      const auto& br = net_.branches()[e];
      if (uf.unite(net_.bus_index(br.from), net_.bus_index(br.to))) ++joins;
    }
    return joins + 1 == net_.bus_count();
  }

  void recurse(std::size_t k) {
    if (included_ + 1 == net_.bus_count()) {
      ++count_;
      visit_(mask_);
      return;
    }
    if (k == free_.size()) return;
    const std::size_t e = free_[k];
    const auto& br = net_.branches()[e];
    if (uf_.unite(net_.bus_index(br.from), net_.bus_index(br.to))) {
      mask_[e] = 1;
      ++included_;
      recurse(k + 1);
      --included_;
      mask_[e] = 0;
      uf_.undo();
    }
    if (still_connectable(k + 1)) recurse(k + 1);
  }

  const Network& net_;
  const std::function<void(std::span<const std::uint8_t>)>& visit_;
  RollbackUnionFind uf_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::size_t> free_pos_;
  std::vector<std::size_t> free_;
  std::size_t included_ = 0;
  std::uint64_t count_ = 0;
};

}  // namespace

BigCount count_spanning_trees(const Network& net) {
  // Contract non-switchable branches; they belong to every radial configuration.
  UnionFind uf(net.bus_count());
  for (const auto& br : net.branches()) {
    if (!br.switchable && !uf.unite(net.bus_index(br.from), net.bus_index(br.to))) return 0;
  }
  std::vector<std::size_t> node(net.bus_count());
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < net.bus_count(); ++i) {
    const std::size_t r = uf.find(i);
    auto it = std::find(roots.begin(), roots.end(), r);
    if (it == roots.end()) {
      node[i] = roots.size();
      roots.push_back(r);
    } else {
      node[i] = static_cast<std::size_t>(it - roots.begin());
    }
  }
  const std::size_t m = roots.size();
  if (m == 1) return 1;

  std::vector<std::vector<BigCount>> lap(m, std::vector<BigCount>(m, 0));
  for (const auto& br : net.branches()) {
    if (!br.switchable) continue;
    const std::size_t a = node[net.bus_index(br.from)];
    const std::size_t b = node[net.bus_index(br.to)];
    if (a == b) continue;
    lap[a][a] += 1;
    lap[b][b] += 1;
    lap[a][b] -= 1;
    lap[b][a] -= 1;
  }

  // Bareiss fraction-free elimination on the Laplacian with row/column 0 removed.
  const std::size_t d = m - 1;
  std::vector<std::vector<BigCount>> a(d, std::vector<BigCount>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) a[i][j] = lap[i + 1][j + 1];
  }
  BigCount prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (a[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < d && a[p][k] == 0) ++p;
      if (p == d) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < d; ++i) {
      for (std::size_t j = k + 1; j < d; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  BigCount det = a[d - 1][d - 1];
  return sign < 0 ? BigCount(-det) : det;
}

std::uint64_t enumerate_spanning_trees(const Network& net,
                                       const std::function<void(std::span<const std::uint8_t>)>& visit) {
  return TreeEnumerator(net, visit).run();
}

}  // namespace sdnr
