#include "smarrt/utility_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace smarrt {
namespace {

int cells_along(double length, double cell) {
  // Tolerate rounding when the length is an exact multiple of the cell size.
  return std::max(1, static_cast<int>(std::ceil(length / cell - 1e-9)));
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

MultiResolutionMap::MultiResolutionMap(const Rect& bounds, double min_cell)
    : bounds_(bounds), min_cell_(min_cell) {
  if (!(min_cell > 0.0) || !std::isfinite(min_cell)) {
    throw std::invalid_argument("min_cell must be positive");
  }
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
    throw std::invalid_argument("map bounds must have positive extent");
  }
  cols_ = cells_along(bounds.width(), min_cell);
  rows_ = cells_along(bounds.height(), min_cell);
  side0_ = next_pow2(std::max({cols_, rows_, 4}));

  cells_.resize(static_cast<std::size_t>(side0_) * static_cast<std::size_t>(side0_));
  for (int iy = 0; iy < side0_; ++iy) {
    for (int ix = 0; ix < side0_; ++ix) {
      cells_[flat(ix, iy)].padding = ix >= cols_ || iy >= rows_;
    }
  }
  for (int s = side0_; s >= 2; s >>= 1) utility_.push_back(Eigen::ArrayXXd::Zero(s, s));
}

CellIndex MultiResolutionMap::cell_of(const Point2& p) const {
  if (!point_in_rect(p, bounds_)) throw std::out_of_range("point outside the map bounds");
  const int ix = std::min(cols_ - 1, static_cast<int>(std::floor((p.x() - bounds_.min.x()) / min_cell_)));
  const int iy = std::min(rows_ - 1, static_cast<int>(std::floor((p.y() - bounds_.min.y()) / min_cell_)));
  return CellIndex{0, ix, iy};
}

CellIndex MultiResolutionMap::ancestor(const CellIndex& c, int level) const {
  const int shift = level - c.level;
  return CellIndex{level, c.ix >> shift, c.iy >> shift};
}

Point2 MultiResolutionMap::cell_center(const CellIndex& c) const {
  const double size = min_cell_ * static_cast<double>(1 << c.level);
  return bounds_.min + Point2((c.ix + 0.5) * size, (c.iy + 0.5) * size);
}

Rect MultiResolutionMap::cell_rect(const CellIndex& c) const {
  const double size = min_cell_ * static_cast<double>(1 << c.level);
  const Point2 lo = bounds_.min + Point2(c.ix * size, c.iy * size);
  return Rect{lo, lo + Point2(size, size)};
}

void MultiResolutionMap::sort_labels(Level0Cell& cell) {
  cell.labels.clear();
  for (const auto& e : cell.entries) cell.labels.push_back(e.second);
  std::sort(cell.labels.begin(), cell.labels.end());
  cell.labels.erase(std::unique(cell.labels.begin(), cell.labels.end()), cell.labels.end());
}

void MultiResolutionMap::index_node(NodeId id, const Point2& p, int label) {
  const CellIndex c = cell_of(p);
  Level0Cell& cell = cells_[flat(c.ix, c.iy)];
  cell.entries.emplace_back(id, label);
  auto pos = std::lower_bound(cell.labels.begin(), cell.labels.end(), label);
  if (pos == cell.labels.end() || *pos != label) cell.labels.insert(pos, label);
}

void MultiResolutionMap::remove_node(NodeId id, const Point2& p) {
  const CellIndex c = cell_of(p);
  Level0Cell& cell = cells_[flat(c.ix, c.iy)];
  std::erase_if(cell.entries, [&](const auto& e) { return e.first == id; });
  sort_labels(cell);
}

void MultiResolutionMap::clear_nodes() {
  for (auto& cell : cells_) {
    cell.entries.clear();
    cell.labels.clear();
  }
}

void MultiResolutionMap::mark_validity() {
  // Per-cell label range: empty cells are [max, min], mixed cells [-1, max], single labels [l, l].
  // A cell is valid when the min over its 3x3 neighbourhood is below the max.
  constexpr int kHigh = std::numeric_limits<int>::max();
  constexpr int kLow = std::numeric_limits<int>::min();
  const int side = side0_;
  Eigen::ArrayXXi lo = Eigen::ArrayXXi::Constant(side + 2, side + 2, kHigh);
  Eigen::ArrayXXi hi = Eigen::ArrayXXi::Constant(side + 2, side + 2, kLow);
  for (int iy = 0; iy < side; ++iy) {
    for (int ix = 0; ix < side; ++ix) {
      const auto& labels = cells_[flat(ix, iy)].labels;
      if (labels.empty()) continue;
      const bool mixed = labels.size() > 1;
      lo(iy + 1, ix + 1) = mixed ? -1 : labels.front();
      hi(iy + 1, ix + 1) = mixed ? kHigh : labels.front();
    }
  }
  const Eigen::Index n = side;
  const Eigen::ArrayXXi lo_x = lo.middleCols(0, n).min(lo.middleCols(1, n)).min(lo.middleCols(2, n));
  const Eigen::ArrayXXi hi_x = hi.middleCols(0, n).max(hi.middleCols(1, n)).max(hi.middleCols(2, n));
  const Eigen::ArrayXXi lo_n = lo_x.middleRows(0, n).min(lo_x.middleRows(1, n)).min(lo_x.middleRows(2, n));
  const Eigen::ArrayXXi hi_n = hi_x.middleRows(0, n).max(hi_x.middleRows(1, n)).max(hi_x.middleRows(2, n));
  for (int iy = 0; iy < side; ++iy) {
    for (int ix = 0; ix < side; ++ix) {
      Level0Cell& cell = cells_[flat(ix, iy)];
      cell.state = !cell.padding && lo_n(iy, ix) < hi_n(iy, ix) ? CellState::Valid : CellState::Invalid;
    }
  }
}

void MultiResolutionMap::compute_utilities(const Point2& p_c, const Point2& p_g) {
  Eigen::ArrayXXd& u0 = utility_[0];
  for (int iy = 0; iy < side0_; ++iy) {
    for (int ix = 0; ix < side0_; ++ix) {
      if (cells_[flat(ix, iy)].state != CellState::Valid) {
        u0(iy, ix) = 0.0;
        continue;
      }
      const Point2 centre = cell_center(CellIndex{0, ix, iy});
      const double route = dist(p_c, centre) + dist(centre, p_g);
      u0(iy, ix) = 1.0 / std::max(route, 1e-12);
    }
  }
  rebuild_pyramid();
}

void MultiResolutionMap::assign_level0_utilities(const Eigen::ArrayXXd& level0) {
  if (level0.rows() != side0_ || level0.cols() != side0_) {
    throw std::invalid_argument("level-0 utility grid has the wrong shape");
  }
  for (int iy = 0; iy < side0_; ++iy) {
    for (int ix = 0; ix < side0_; ++ix) {
      Level0Cell& cell = cells_[flat(ix, iy)];
      const bool valid = !cell.padding && level0(iy, ix) > 0.0;
      cell.state = valid ? CellState::Valid : CellState::Invalid;
      utility_[0](iy, ix) = valid ? level0(iy, ix) : 0.0;
    }
  }
  rebuild_pyramid();
}

void MultiResolutionMap::rebuild_pyramid() {
  for (std::size_t l = 1; l < utility_.size(); ++l) {
    const Eigen::ArrayXXd& fine = utility_[l - 1];
    Eigen::ArrayXXd& coarse = utility_[l];
    for (int iy = 0; iy < coarse.rows(); ++iy) {
      for (int ix = 0; ix < coarse.cols(); ++ix) {
        coarse(iy, ix) = fine.block<2, 2>(2 * iy, 2 * ix).maxCoeff();
      }
    }
  }
}

void MultiResolutionMap::refresh_ancestors(int ix, int iy) {
  for (std::size_t l = 1; l < utility_.size(); ++l) {
    ix >>= 1;
    iy >>= 1;
    utility_[l](iy, ix) = utility_[l - 1].block<2, 2>(2 * iy, 2 * ix).maxCoeff();
  }
}

void MultiResolutionMap::suppress(const CellIndex& level0) {
  utility_[0](level0.iy, level0.ix) = 0.0;
  refresh_ancestors(level0.ix, level0.iy);
}

std::optional<CellIndex> MultiResolutionMap::search_sampling_cell(const CellIndex& robot_cell) const {
  // Argmax over [x0, x1] x [y0, y1] at one level; rows scanned first so ties keep the
  // smallest (iy, ix).
  const auto best_in = [&](int level, int x0, int x1, int y0, int y1) -> std::optional<CellIndex> {
    const Eigen::ArrayXXd& u = utility_[level];
    const int last = side(level) - 1;
    std::optional<CellIndex> best;
    double best_u = 0.0;
    for (int iy = std::max(0, y0); iy <= std::min(last, y1); ++iy) {
      for (int ix = std::max(0, x0); ix <= std::min(last, x1); ++ix) {
        if (u(iy, ix) > best_u) {
          best_u = u(iy, ix);
          best = CellIndex{level, ix, iy};
        }
      }
    }
    return best;
  };

  for (int level = 0; level <= top_level(); ++level) {
    const CellIndex here = ancestor(robot_cell, level);
    auto found = best_in(level, here.ix - 1, here.ix + 1, here.iy - 1, here.iy + 1);
    if (!found) continue;
    CellIndex cell = *found;
    while (cell.level > 0) {
      const int l = cell.level - 1;
      cell = *best_in(l, 2 * cell.ix, 2 * cell.ix + 1, 2 * cell.iy, 2 * cell.iy + 1);
    }
    return cell;
  }
  return std::nullopt;
}

}  // namespace smarrt
