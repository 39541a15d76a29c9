#pragma once

#include "smarrt/planner.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace smarrt {

/// Shared plumbing for the reactive RRT baselines: biased target selection, budgeted tree
/// extension against statics and current zones, and replan timing.
class BaselinePlanner : public Planner {
 public:
  BaselinePlanner(const PlannerConfig& config, const BaselineConfig& baseline, std::uint64_t seed);

  RobotStatus tick(DynamicEnvironment& env, double dt) final;
  const BaselineConfig& baseline_config() const { return baseline_; }

 protected:
  /// True when the current path must be replaced. May edit the tree (tree-checking planners).
  virtual bool invalidated(const DynamicEnvironment& env, std::span<const Circle> zones) = 0;
  /// Builds and adopts a new path; false when the budget runs out.
  virtual bool replan(const DynamicEnvironment& env, std::span<const Circle> zones) = 0;

  /// Picks a growth target: a cached waypoint, the growth goal, or a uniform sample.
  Point2 biased_target(const DynamicEnvironment& env, const Point2& toward);
  /// One RRT extension from the nearest node accepted by `from`. Returns the new node.
  std::optional<NodeId> extend(const DynamicEnvironment& env, std::span<const Circle> zones,
                               const Point2& target, const std::function<bool(NodeId)>& from);
  /// Entire remaining path (robot first) against the zones.
  bool path_blocked(const DynamicEnvironment& env, std::span<const Circle> zones) const;
  void remember_waypoints();
  /// Colliding nodes: inside a zone, or joined to their parent by a blocked edge.
  std::vector<NodeId> colliding_nodes(std::span<const Circle> zones) const;
  /// Adopts the chain from the robot-side root down to `leaf`, dropping the root itself.
  void adopt_from_root(NodeId leaf);

  BaselineConfig baseline_;
  std::vector<Point2> waypoint_cache_;
};

/// Extended RRT: any conflict on the path discards the whole tree and regrows it from the robot.
class ErrtPlanner final : public BaselinePlanner {
 public:
  using BaselinePlanner::BaselinePlanner;
  std::string_view name() const override { return "errt"; }
  bool initial_plan(const DynamicEnvironment& env, const Point2& start, const Point2& goal) override;

 protected:
  bool invalidated(const DynamicEnvironment& env, std::span<const Circle> zones) override;
  bool replan(const DynamicEnvironment& env, std::span<const Circle> zones) override;

 private:
  bool grow(const DynamicEnvironment& env, std::span<const Circle> zones);
};

/// Dynamic RRT: goal-rooted tree; every colliding node is removed together with its whole
/// subtree, then the tree regrows until it reaches the robot again.
class DrrtPlanner final : public BaselinePlanner {
 public:
  using BaselinePlanner::BaselinePlanner;
  std::string_view name() const override { return "drrt"; }
  bool initial_plan(const DynamicEnvironment& env, const Point2& start, const Point2& goal) override;
  NodeId goal_root() const { return goal_id_; }

 protected:
  bool invalidated(const DynamicEnvironment& env, std::span<const Circle> zones) override;
  bool replan(const DynamicEnvironment& env, std::span<const Circle> zones) override;

 private:
  bool grow(const DynamicEnvironment& env, std::span<const Circle> zones);
  NodeId goal_id_{};
};

/// Multipartite RRT: colliding nodes alone are removed; the orphaned subtrees stay as a
/// forest that the new robot-rooted tree tries to reclaim.
class MprrtPlanner final : public BaselinePlanner {
 public:
  using BaselinePlanner::BaselinePlanner;
  std::string_view name() const override { return "mprrt"; }
  bool initial_plan(const DynamicEnvironment& env, const Point2& start, const Point2& goal) override;

 protected:
  bool invalidated(const DynamicEnvironment& env, std::span<const Circle> zones) override;
  bool replan(const DynamicEnvironment& env, std::span<const Circle> zones) override;

 private:
  bool grow(const DynamicEnvironment& env, std::span<const Circle> zones, NodeId root);
  /// Removes nodes inside a zone and cuts blocked edges, keeping the fragments.
  void prune_colliding(std::span<const Circle> zones);
  std::optional<NodeId> goal_node_;
};

/// Bias-goal-factor RRT: keeps the goal-connected tail of the old path as a second tree and
/// grows a robot tree toward it until the two meet.
class EbgrrtPlanner final : public BaselinePlanner {
 public:
  using BaselinePlanner::BaselinePlanner;
  std::string_view name() const override { return "ebgrrt"; }
  bool initial_plan(const DynamicEnvironment& env, const Point2& start, const Point2& goal) override;
  /// Number of old path nodes carried over by the last replan.
  std::size_t last_remnant_size() const { return last_remnant_; }

 protected:
  bool invalidated(const DynamicEnvironment& env, std::span<const Circle> zones) override;
  bool replan(const DynamicEnvironment& env, std::span<const Circle> zones) override;

 private:
  std::size_t last_remnant_{0};
};

}  // namespace smarrt
