#pragma once

// Independent reference implementations used by unit and acceptance tests.

#include "smarrt/forest.hpp"
#include "smarrt/geometry.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <vector>

namespace smarrt::oracle {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

/// True iff the forest labels partition the live nodes exactly as union-find over the
/// parent edges does, labels are 0..k-1 in first-visit order by id, and k matches.
inline bool labels_match_components(const SearchForest& forest, int k) {
  const auto ids = forest.ids();
  std::map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;
  UnionFind uf(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& parent = forest.node(ids[i]).parent;
    if (parent) uf.unite(i, index.at(*parent));
  }
  std::map<std::size_t, int> label_of_component;
  int next = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::size_t c = uf.find(i);
    auto [it, fresh] = label_of_component.try_emplace(c, next);
    if (fresh) ++next;
    if (forest.label(ids[i]) != it->second) return false;
  }
  return next == k;
}

/// Random forest of up to `max_nodes` nodes: each node attaches to a random earlier node
/// or starts a new tree; then a random subset is pruned.
inline SearchForest random_forest(std::mt19937_64& rng, int max_nodes) {
  SearchForest forest(2.0);
  std::uniform_int_distribution<int> count(1, max_nodes);
  std::uniform_real_distribution<double> coord(0.0, 32.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int n = count(rng);
  std::vector<NodeId> made;
  for (int i = 0; i < n; ++i) {
    std::optional<NodeId> parent;
    if (!made.empty() && u01(rng) > 0.05) {
      parent = made[std::uniform_int_distribution<std::size_t>(0, made.size() - 1)(rng)];
    }
    made.push_back(forest.insert(Point2(coord(rng), coord(rng)), parent));
  }
  std::vector<NodeId> victims;
  const double fraction = 0.3 * u01(rng);
  for (const NodeId id : made) {
    if (u01(rng) < fraction) victims.push_back(id);
  }
  forest.prune(victims);
  return forest;
}

/// Utility of a coarse cell computed straight from the level-0 block it covers.
inline double block_max(const Eigen::ArrayXXd& level0, int level, int ix, int iy) {
  const int s = 1 << level;
  return level0.block(iy * s, ix * s, s, s).maxCoeff();
}

struct Cell {
  int level;
  int ix;
  int iy;
  bool operator==(const Cell&) const = default;
};

/// Exhaustive ascend/descend search over a square level-0 utility grid (rows = iy).
inline std::optional<Cell> search(const Eigen::ArrayXXd& level0, int robot_ix, int robot_iy) {
  const int side0 = static_cast<int>(level0.cols());
  int levels = 0;
  while ((side0 >> levels) >= 2) ++levels;
  const auto argmax = [&](int level, const std::vector<Cell>& candidates) -> std::optional<Cell> {
    std::optional<Cell> best;
    double best_u = 0.0;
    for (const Cell& c : candidates) {
      const double u = block_max(level0, level, c.ix, c.iy);
      const bool better = u > best_u || (best && u == best_u && (c.iy < best->iy || (c.iy == best->iy && c.ix < best->ix)));
      if (u > 0.0 && (!best || better)) {
        best = c;
        best_u = u;
      }
    }
    return best;
  };
  for (int level = 0; level < levels; ++level) {
    const int side = side0 >> level;
    const int cx = robot_ix >> level;
    const int cy = robot_iy >> level;
    std::vector<Cell> around;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = cx + dx, y = cy + dy;
        if (x >= 0 && y >= 0 && x < side && y < side) around.push_back({level, x, y});
      }
    }
    auto found = argmax(level, around);
    if (!found) continue;
    Cell cell = *found;
    while (cell.level > 0) {
      const int l = cell.level - 1;
      std::vector<Cell> children;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) children.push_back({l, 2 * cell.ix + dx, 2 * cell.iy + dy});
      }
      cell = *argmax(l, children);
    }
    return cell;
  }
  return std::nullopt;
}

/// Nodes inside the horizon disc and inside at least one zone.
inline std::set<NodeId> risky_nodes(const SearchForest& forest, const Circle& horizon,
                                   std::span<const Circle> zones) {
  std::set<NodeId> out;
  for (const NodeId id : forest.ids()) {
    const Point2& p = forest.position(id);
    if (!point_in_circle(p, horizon)) continue;
    for (const Circle& z : zones) {
      if (point_in_circle(p, z)) {
        out.insert(id);
        break;
      }
    }
  }
  return out;
}

/// Level-0 validity from scratch: V iff the 3x3 block holds at least two distinct labels.
inline std::vector<std::vector<bool>> validity(const std::vector<std::vector<std::set<int>>>& labels) {
  const int side = static_cast<int>(labels.size());
  std::vector<std::vector<bool>> valid(side, std::vector<bool>(side, false));
  for (int iy = 0; iy < side; ++iy) {
    for (int ix = 0; ix < side; ++ix) {
      std::set<int> seen;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int x = ix + dx, y = iy + dy;
          if (x >= 0 && y >= 0 && x < side && y < side) seen.insert(labels[y][x].begin(), labels[y][x].end());
        }
      }
      valid[iy][ix] = seen.size() >= 2;
    }
  }
  return valid;
}

}  // namespace smarrt::oracle
