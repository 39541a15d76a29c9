#include "smarrt/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace smarrt {

// ---------------------------------------------------------------------------
// SpatialHash

SpatialHash::Key SpatialHash::key_of(const Point2& p) const {
  return Key{static_cast<std::int64_t>(std::floor(p.x() / bucket_)),
             static_cast<std::int64_t>(std::floor(p.y() / bucket_))};
}

void SpatialHash::insert(NodeId id, const Point2& p) {
  const Key k = key_of(p);
  cells_[k].push_back(Entry{id, p});
  if (size_ == 0 && max_x_ < min_x_) {
    min_x_ = max_x_ = k.x;
    min_y_ = max_y_ = k.y;
  } else {
    min_x_ = std::min(min_x_, k.x);
    max_x_ = std::max(max_x_, k.x);
    min_y_ = std::min(min_y_, k.y);
    max_y_ = std::max(max_y_, k.y);
  }
  ++size_;
}

void SpatialHash::erase(NodeId id, const Point2& p) {
  auto it = cells_.find(key_of(p));
  if (it == cells_.end()) return;
  auto& bucket = it->second;
  auto pos = std::find_if(bucket.begin(), bucket.end(), [&](const Entry& e) { return e.id == id; });
  if (pos == bucket.end()) return;
  bucket.erase(pos);
  if (bucket.empty()) cells_.erase(it);
  --size_;
}

void SpatialHash::clear() {
  cells_.clear();
  size_ = 0;
  min_x_ = min_y_ = 0;
  max_x_ = max_y_ = -1;
}

std::optional<NodeId> SpatialHash::nearest(const Point2& p,
                                           const std::function<bool(NodeId)>& keep) const {
  if (size_ == 0) return std::nullopt;
  const Key k = key_of(p);
  std::optional<NodeId> best;
  double best_d2 = std::numeric_limits<double>::infinity();

  const auto visit = [&](std::int64_t x, std::int64_t y) {
    auto it = cells_.find(Key{x, y});
    if (it == cells_.end()) return;
    for (const Entry& e : it->second) {
      if (keep && !keep(e.id)) continue;
      const double d2 = (e.p - p).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && best && e.id < *best)) {
        best_d2 = d2;
        best = e.id;
      }
    }
  };

  for (std::int64_t r = 0;; ++r) {
    const std::int64_t x0 = std::max(k.x - r, min_x_);
    const std::int64_t x1 = std::min(k.x + r, max_x_);
    const std::int64_t y0 = std::max(k.y - r + 1, min_y_);
    const std::int64_t y1 = std::min(k.y + r - 1, max_y_);
    if (r == 0) {
      visit(k.x, k.y);
    } else {
      for (std::int64_t x = x0; x <= x1; ++x) {
        if (k.y - r >= min_y_ && k.y - r <= max_y_) visit(x, k.y - r);
        if (k.y + r >= min_y_ && k.y + r <= max_y_) visit(x, k.y + r);
      }
      for (std::int64_t y = y0; y <= y1; ++y) {
        if (k.x - r >= min_x_ && k.x - r <= max_x_) visit(k.x - r, y);
        if (k.x + r >= min_x_ && k.x + r <= max_x_) visit(k.x + r, y);
      }
    }
    // Anything outside ring r is at least r buckets away; strict so ties are still seen.
    if (best && std::sqrt(best_d2) < static_cast<double>(r) * bucket_) break;
    if (k.x - r <= min_x_ && k.x + r >= max_x_ && k.y - r <= min_y_ && k.y + r >= max_y_) break;
  }
  return best;
}

std::vector<NodeId> SpatialHash::within(const Point2& p, double radius) const {
  std::vector<std::pair<double, NodeId>> hits;
  const Key lo = key_of(p - Point2(radius, radius));
  const Key hi = key_of(p + Point2(radius, radius));
  const double r2 = radius * radius;
  for (std::int64_t x = std::max(lo.x, min_x_); x <= std::min(hi.x, max_x_); ++x) {
    for (std::int64_t y = std::max(lo.y, min_y_); y <= std::min(hi.y, max_y_); ++y) {
      auto it = cells_.find(Key{x, y});
      if (it == cells_.end()) continue;
      for (const Entry& e : it->second) {
        const double d2 = (e.p - p).squaredNorm();
        if (d2 <= r2) hits.emplace_back(d2, e.id);
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  std::vector<NodeId> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(h.second);
  return out;
}

// ---------------------------------------------------------------------------
// SearchForest

void SearchForest::throw_unknown(NodeId id) { throw ForestError("unknown node id " + std::to_string(id.value)); }

Node& SearchForest::mutable_node(NodeId id) {
  if (!alive(id)) throw_unknown(id);
  return nodes_[slot(id)];
}

NodeId SearchForest::insert(const Point2& p, std::optional<NodeId> parent) {
  if (parent && !alive(*parent)) {
    throw ForestError("unknown parent id " + std::to_string(parent->value));
  }
  const NodeId id = watermark();
  Node n;
  n.position = p;
  n.parent = parent;
  if (parent) {
    Node& up = nodes_[slot(*parent)];
    n.tree_label = up.tree_label;
    up.children.push_back(id);
  } else {
    n.tree_label = next_label_++;
    roots_.insert(id);
  }
  nodes_.push_back(std::move(n));
  alive_.push_back(1);
  index_.insert(id, p);
  ++live_count_;
  return id;
}

std::vector<NodeId> SearchForest::ids() const {
  std::vector<NodeId> out;
  out.reserve(live_count_);
  for (std::uint32_t i = 0; i < alive_.size(); ++i) {
    if (alive_[i]) out.push_back(NodeId{base_ + i});
  }
  return out;
}

NodeId SearchForest::nearest(const Point2& p) const {
  auto best = index_.nearest(p, {});
  if (!best) throw ForestError("nearest on an empty forest");
  return *best;
}

std::optional<NodeId> SearchForest::nearest_if(const Point2& p,
                                               const std::function<bool(NodeId)>& keep) const {
  return index_.nearest(p, keep);
}

std::vector<NodeId> SearchForest::within(const Point2& p, double radius) const {
  return index_.within(p, radius);
}

void SearchForest::unlink_from_parent(NodeId child) {
  Node& c = nodes_[slot(child)];
  if (!c.parent) return;
  if (alive(*c.parent)) {
    auto& siblings = nodes_[slot(*c.parent)].children;
    siblings.erase(std::remove(siblings.begin(), siblings.end(), child), siblings.end());
  }
  c.parent.reset();
}

std::size_t SearchForest::prune(const std::vector<NodeId>& victims) {
  std::size_t removed = 0;
  for (NodeId v : victims) {
    if (!alive(v)) continue;
    Node& n = nodes_[slot(v)];
    unlink_from_parent(v);
    for (NodeId c : n.children) {
      if (alive(c)) {
        nodes_[slot(c)].parent.reset();
        roots_.insert(c);
      }
    }
    n.children.clear();
    roots_.erase(v);
    index_.erase(v, n.position);
    alive_[slot(v)] = 0;
    --live_count_;
    ++removed;
  }
  return removed;
}

void SearchForest::detach(NodeId child) {
  mutable_node(child);
  if (!nodes_[slot(child)].parent) return;
  unlink_from_parent(child);
  roots_.insert(child);
  set_subtree_label(child, next_label_++);
}

int SearchForest::floodfill_relabel() {
  int label = 0;
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<NodeId> stack;
  const auto push = [&](NodeId id) {
    if (!seen[slot(id)]) {
      seen[slot(id)] = 1;
      stack.push_back(id);
    }
  };
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (!alive_[i] || seen[i]) continue;
    push(NodeId{base_ + i});
    while (!stack.empty()) {
      const NodeId cur = stack.back();
      stack.pop_back();
      Node& n = nodes_[slot(cur)];
      n.tree_label = label;
      if (n.parent) push(*n.parent);
      for (NodeId c : n.children) push(c);
    }
    ++label;
  }
  next_label_ = label;
  return label;
}

std::vector<NodeId> SearchForest::extract_ids(NodeId leaf) const {
  node(leaf);
  std::vector<NodeId> out;
  for (std::optional<NodeId> cur = leaf; cur; cur = nodes_[slot(*cur)].parent) {
    out.push_back(*cur);
  }
  return out;
}

std::vector<Point2> SearchForest::extract_path(NodeId leaf) const {
  std::vector<Point2> out;
  for (NodeId id : extract_ids(leaf)) out.push_back(nodes_[slot(id)].position);
  return out;
}

double SearchForest::cost_to_root(NodeId id) const {
  double total = 0.0;
  const Node* n = &node(id);
  while (n->parent) {
    const Node& up = nodes_[slot(*n->parent)];
    total += dist(n->position, up.position);
    n = &up;
  }
  return total;
}

NodeId SearchForest::root_of(NodeId id) const {
  node(id);
  while (nodes_[slot(id)].parent) id = *nodes_[slot(id)].parent;
  return id;
}

void SearchForest::set_subtree_label(NodeId top, int label) {
  std::vector<NodeId> stack{top};
  while (!stack.empty()) {
    const NodeId cur = stack.back();
    stack.pop_back();
    Node& n = nodes_[slot(cur)];
    n.tree_label = label;
    for (NodeId c : n.children) stack.push_back(c);
  }
}

void SearchForest::reparent(NodeId child, NodeId new_parent) {
  mutable_node(child);
  mutable_node(new_parent);
  for (std::optional<NodeId> cur = new_parent; cur; cur = nodes_[slot(*cur)].parent) {
    if (*cur == child) throw ForestError("reparent would create a cycle");
  }
  unlink_from_parent(child);
  roots_.erase(child);
  nodes_[slot(child)].parent = new_parent;
  nodes_[slot(new_parent)].children.push_back(child);
  set_subtree_label(child, nodes_[slot(new_parent)].tree_label);
}

void SearchForest::reroot(NodeId id) {
  const NodeId old_root = root_of(id);
  if (old_root == id) return;
  // Flip every edge on the way up.
  std::optional<NodeId> prev;
  NodeId cur = id;
  while (true) {
    Node& n = nodes_[slot(cur)];
    const std::optional<NodeId> up = n.parent;
    if (up) {
      auto& siblings = nodes_[slot(*up)].children;
      siblings.erase(std::remove(siblings.begin(), siblings.end(), cur), siblings.end());
      n.children.push_back(*up);
    }
    n.parent = prev;
    if (!up) break;
    prev = cur;
    cur = *up;
  }
  roots_.erase(old_root);
  roots_.insert(id);
}

void SearchForest::clear() {
  base_ = watermark().value;
  nodes_.clear();
  alive_.clear();
  roots_.clear();
  index_.clear();
  live_count_ = 0;
  next_label_ = 0;
}

}  // namespace smarrt
