#pragma once

#include "smarrt/forest.hpp"
#include "smarrt/geometry.hpp"

#include <Eigen/Core>

#include <compare>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace smarrt {

struct CellIndex {
  int level{0};
  int ix{0};
  int iy{0};
  auto operator<=>(const CellIndex&) const = default;
};

enum class CellState : unsigned char { Invalid, Valid };

/// Finest-level cell: the tree nodes it indexes and the set of tree labels they carry.
struct Level0Cell {
  std::vector<std::pair<NodeId, int>> entries;
  std::vector<int> labels;  // sorted, unique
  CellState state{CellState::Invalid};
  bool padding{false};      // outside the real workspace; never valid
};

/// Hierarchical tiling of the workspace. Level 0 holds side x side cells of `min_cell`
/// metres (side a power of two >= 4); each coarser level halves the side, down to 2 x 2.
///
/// Utilities live in one Eigen array per level, indexed (iy, ix). A valid level-0 cell gets
/// 1 / (|p_c - centre| + |centre - p_g|); a coarse cell holds the max of its four children.
class MultiResolutionMap {
 public:
  /// Throws std::invalid_argument for non-positive min_cell or empty bounds.
  MultiResolutionMap(const Rect& bounds, double min_cell);

  const Rect& bounds() const { return bounds_; }
  double min_cell() const { return min_cell_; }
  int level_count() const { return static_cast<int>(utility_.size()); }
  int top_level() const { return level_count() - 1; }
  int side(int level) const { return side0_ >> level; }
  std::size_t cell_count(int level) const {
    return static_cast<std::size_t>(side(level)) * static_cast<std::size_t>(side(level));
  }

  /// Level-0 cell containing p; cells are half-open except on the far workspace edge.
  /// Throws std::out_of_range outside the bounds.
  CellIndex cell_of(const Point2& p) const;
  CellIndex ancestor(const CellIndex& c, int level) const;
  Point2 cell_center(const CellIndex& c) const;
  Rect cell_rect(const CellIndex& c) const;

  const Level0Cell& cell(int ix, int iy) const { return cells_[flat(ix, iy)]; }

  void index_node(NodeId id, const Point2& p, int label);
  void remove_node(NodeId id, const Point2& p);
  /// Re-reads every indexed node's label.
  template <typename LabelOf>
  void refresh_labels(LabelOf&& label_of) {
    for (auto& cell : cells_) {
      if (cell.entries.empty()) continue;
      bool mixed = false;
      for (auto& e : cell.entries) {
        e.second = label_of(e.first);
        mixed = mixed || e.second != cell.entries.front().second;
      }
      if (mixed) {
        sort_labels(cell);
      } else {
        cell.labels.assign(1, cell.entries.front().second);
      }
    }
  }
  void clear_nodes();

  /// V iff the 3x3 neighbourhood (8-connected) holds nodes of at least two labels.
  void mark_validity();
  void compute_utilities(const Point2& p_c, const Point2& p_g);
  /// Installs level-0 utilities directly (states follow positivity) and rebuilds the pyramid.
  void assign_level0_utilities(const Eigen::ArrayXXd& level0);
  /// Zeroes one level-0 cell and refreshes its ancestors.
  void suppress(const CellIndex& level0);

  double utility(const CellIndex& c) const { return utility_[c.level](c.iy, c.ix); }
  const Eigen::ArrayXXd& utility_grid(int level) const { return utility_[level]; }

  /// Best level-0 cell near the robot: argmax over the robot's 3x3 neighbourhood, climbing
  /// one level at a time until something positive shows up, then descending through the
  /// best child at every finer level. Ties go to the smallest (iy, ix).
  std::optional<CellIndex> search_sampling_cell(const CellIndex& robot_cell) const;

 private:
  std::size_t flat(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(side0_) +
           static_cast<std::size_t>(ix);
  }
  void rebuild_pyramid();
  void refresh_ancestors(int ix, int iy);
  static void sort_labels(Level0Cell& cell);

  Rect bounds_;
  double min_cell_;
  int side0_{0};
  int cols_{0};  // workspace columns before padding
  int rows_{0};
  std::vector<Level0Cell> cells_;
  std::vector<Eigen::ArrayXXd> utility_;
};

}  // namespace smarrt
