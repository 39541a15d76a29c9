#pragma once

#include "smarrt/geometry.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace smarrt {

/// Stable node handle. Ids grow monotonically and are never recycled.
struct NodeId {
  std::uint32_t value{0};
  auto operator<=>(const NodeId&) const = default;
};

struct Node {
  Point2 position{0.0, 0.0};
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  int tree_label{0};
};

class ForestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform hash grid over node positions.
class SpatialHash {
 public:
  explicit SpatialHash(double bucket) : bucket_(bucket) {}

  void insert(NodeId id, const Point2& p);
  void erase(NodeId id, const Point2& p);
  void clear();

  /// Nearest id among entries accepted by `keep`; ties broken by smallest id.
  std::optional<NodeId> nearest(const Point2& p, const std::function<bool(NodeId)>& keep) const;
  /// All ids within `radius` (closed), sorted by (distance, id).
  std::vector<NodeId> within(const Point2& p, double radius) const;

 private:
  struct Key {
    std::int64_t x;
    std::int64_t y;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<std::int64_t>{}(k.x * 73856093 ^ k.y * 19349663);
    }
  };
  struct Entry {
    NodeId id;
    Point2 p;
  };
  Key key_of(const Point2& p) const;

  double bucket_;
  std::unordered_map<Key, std::vector<Entry>, KeyHash> cells_;
  std::size_t size_{0};
  std::int64_t min_x_{0}, max_x_{-1}, min_y_{0}, max_y_{-1};
};

/// Node storage for one or more trees. Pruning leaves orphans as new roots rather than
/// deleting whole branches; floodfill_relabel() assigns one label per connected tree.
class SearchForest {
 public:
  explicit SearchForest(double bucket_size = 2.0) : index_(bucket_size) {}

  NodeId insert(const Point2& p, std::optional<NodeId> parent = std::nullopt);

  bool alive(NodeId id) const {
    return id.value >= base_ && id.value - base_ < alive_.size() && alive_[id.value - base_];
  }
  const Node& node(NodeId id) const {
    if (!alive(id)) [[unlikely]] throw_unknown(id);
    return nodes_[slot(id)];
  }
  const Point2& position(NodeId id) const { return node(id).position; }
  int label(NodeId id) const { return node(id).tree_label; }

  std::size_t size() const { return live_count_; }
  bool empty() const { return live_count_ == 0; }
  /// First id that has not been handed out yet.
  NodeId watermark() const { return NodeId{base_ + static_cast<std::uint32_t>(nodes_.size())}; }
  const std::set<NodeId>& roots() const { return roots_; }
  /// Live ids in increasing order.
  std::vector<NodeId> ids() const;

  NodeId nearest(const Point2& p) const;
  std::optional<NodeId> nearest_if(const Point2& p, const std::function<bool(NodeId)>& keep) const;
  std::vector<NodeId> within(const Point2& p, double radius) const;

  /// Removes the victims only; their surviving children become roots.
  std::size_t prune(const std::vector<NodeId>& victims);
  /// Cuts the edge between `child` and its parent; `child` becomes a root.
  void detach(NodeId child);
  /// Labels connected trees 0..k-1 in first-visit order from the smallest id; returns k.
  int floodfill_relabel();
  /// Leaf-to-root positions.
  std::vector<Point2> extract_path(NodeId leaf) const;
  std::vector<NodeId> extract_ids(NodeId leaf) const;
  /// Arc length from the node up to its root.
  double cost_to_root(NodeId id) const;
  NodeId root_of(NodeId id) const;

  /// Moves `child` (with its subtree) under `new_parent`. Throws ForestError on cycles.
  void reparent(NodeId child, NodeId new_parent);
  /// Reverses parent links so that `id` becomes the root of its tree.
  void reroot(NodeId id);

  /// Drops every node. Ids keep increasing afterwards.
  void clear();

 private:
  std::size_t slot(NodeId id) const { return id.value - base_; }
  [[noreturn]] static void throw_unknown(NodeId id);
  Node& mutable_node(NodeId id);
  void unlink_from_parent(NodeId child);
  void set_subtree_label(NodeId top, int label);

  std::vector<Node> nodes_;  // slot i holds id base_ + i
  std::vector<char> alive_;
  std::uint32_t base_{0};
  std::set<NodeId> roots_;
  SpatialHash index_;
  std::size_t live_count_{0};
  int next_label_{0};
};

}  // namespace smarrt
