#pragma once

#include "smarrt/planner.hpp"
#include "smarrt/utility_map.hpp"

#include <optional>
#include <vector>

namespace smarrt {

/// Goal-rooted RRT that repairs itself locally. Each tick only the stretch of path the robot
/// covers in 2 * t_u is checked; on a conflict, nodes inside both the horizon disc and a
/// collision zone are dropped (their subtrees survive as separate trees), and new samples
/// are placed in the finest map cell that borders several trees and promises the shortest
/// robot-to-goal route.
class SmarrtPlanner final : public Planner {
 public:
  SmarrtPlanner(const PlannerConfig& config, const Rect& bounds, std::uint64_t seed);

  std::string_view name() const override { return "smarrt"; }
  bool initial_plan(const DynamicEnvironment& env, const Point2& start, const Point2& goal) override;
  RobotStatus tick(DynamicEnvironment& env, double dt) override;
  const MultiResolutionMap* utility_map() const override { return &map_; }

  /// False iff the path between p_c and p_f crosses a collision zone.
  bool check_feasibility(const DynamicEnvironment& env) const;
  /// Removes nodes inside the horizon disc and inside any collision zone, then relabels.
  std::size_t prune_risky(const DynamicEnvironment& env);
  /// Reconnects the robot to the goal tree. Returns the new path ids (goal root last) and
  /// adopts them, or nullopt when every strategy ran out of budget.
  std::optional<std::vector<NodeId>> repair(const DynamicEnvironment& env);
  /// Switches to a shorter route through a nearby node when one exists. True on a switch.
  bool better_path_search(const DynamicEnvironment& env);

  /// r_h = |p_c - p_f| clamped to [r_h_min, r_h_max].
  double horizon_radius() const;
  std::optional<CellIndex> last_sampling_cell() const { return last_sampling_cell_; }
  NodeId goal_root() const { return goal_id_; }

  // Fixture hooks: build a tree by hand and place the robot on it.
  void reset_tree(const Point2& robot, const Point2& goal);
  NodeId add_node(const Point2& p, std::optional<NodeId> parent);
  void follow(NodeId leaf) { adopt_path(forest_.extract_ids(leaf)); }
  void place_robot(const Point2& p) { robot_ = p; }
  SearchForest& mutable_forest() { return forest_; }
  MultiResolutionMap& mutable_map() { return map_; }

 private:
  void relabel();
  /// Validity and utilities for the current forest and robot position.
  void build_map();
  std::optional<std::vector<NodeId>> connect_robot(const DynamicEnvironment& env,
                                                   std::span<const Circle> zones) const;
  bool robot_has_anchor(const DynamicEnvironment& env, std::span<const Circle> zones) const;
  std::optional<NodeId> blocked_edge(std::span<const NodeId> ids, std::span<const Circle> zones) const;
  bool sample_in_cell(const CellIndex& cell, const DynamicEnvironment& env, std::span<const Circle> zones);
  std::optional<std::vector<NodeId>> grow_fallback(const DynamicEnvironment& env,
                                                   std::span<const Circle> zones);
  std::vector<int> robot_labels(const DynamicEnvironment& env, std::span<const Circle> zones) const;

  MultiResolutionMap map_;
  NodeId goal_id_{};
  std::optional<CellIndex> last_sampling_cell_;
};

}  // namespace smarrt
