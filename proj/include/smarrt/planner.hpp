#pragma once

#include "smarrt/environment.hpp"
#include "smarrt/forest.hpp"
#include "smarrt/geometry.hpp"
#include "smarrt/utility_map.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace smarrt {

struct PlannerConfig {
  double steer_step{2.0};
  double goal_tolerance{0.5};
  double robot_speed{4.0};
  double t_u_init{0.05};
  double t_u_smoothing{0.3};
  double r_h_min{1.0};
  double r_h_max{8.0};
  int repair_samples_per_cell{10};
  double connect_radius{4.0};
  double rewire_radius{4.0};
  double goal_bias{0.05};
  double min_cell{1.0};
  int initial_budget{100'000};
  int max_cell_failures{5};
  int fallback_budget{2'000};
  double fallback_bias{0.3};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct BaselineConfig {
  double goal_bias{0.1};
  double waypoint_bias{0.5};
  double subtree_root_bias{0.3};
  int iteration_budget{100'000};

  void validate() const;
};

struct RobotStatus {
  Point2 position{0.0, 0.0};
  bool reached_goal{false};
  bool replanned_this_tick{false};
  bool replan_failed{false};
  bool rerouted{false};
  double replan_wall_time{0.0};  // seconds
  std::size_t pruned{0};
  std::optional<CellIndex> sampling_cell;
};

/// Collision zones with every zone that already contains the robot shrunk to the robot's
/// distance from its centre, so moving away stays admissible while approaching does not.
std::vector<Circle> effective_zones(std::span<const Circle> zones, const Point2& robot);

bool hits_any(const Segment2& s, std::span<const Circle> zones);
bool inside_any(const Point2& p, std::span<const Circle> zones);

struct HorizonCheck {
  bool feasible{true};
  Point2 horizon_point{0.0, 0.0};        // p_f
  std::optional<std::size_t> blocked;    // index i of the first blocked segment (pts[i], pts[i+1])
};

/// Walks `pts` (robot position first) for `horizon` metres of arc length and tests each
/// segment up to that point against the zones. Nothing past the horizon is examined.
HorizonCheck check_horizon(std::span<const Point2> pts, double horizon, std::span<const Circle> zones);

/// Common surface of every reactive planner run by the benchmark.
class Planner {
 public:
  Planner(const PlannerConfig& config, std::uint64_t seed);
  virtual ~Planner() = default;

  virtual std::string_view name() const = 0;
  /// Plans against static obstacles only. Returns false when the budget runs out.
  virtual bool initial_plan(const DynamicEnvironment& env, const Point2& start, const Point2& goal) = 0;
  /// Steps the obstacles, checks and repairs the path, then moves the robot.
  virtual RobotStatus tick(DynamicEnvironment& env, double dt) = 0;

  const Point2& position() const { return robot_; }
  const Point2& goal() const { return goal_; }
  /// Robot position followed by the remaining waypoints.
  std::vector<Point2> path() const;
  std::span<const NodeId> path_ids() const { return path_ids_; }
  double t_u() const { return t_u_; }
  const PlannerConfig& config() const { return config_; }
  const SearchForest& forest() const { return forest_; }
  virtual const MultiResolutionMap* utility_map() const { return nullptr; }

  bool at_goal() const { return dist(robot_, goal_) <= config_.goal_tolerance; }

 protected:
  /// Moves along the path; true when at least one waypoint was reached.
  bool advance(double distance);
  void adopt_path(std::vector<NodeId> ids);
  void clear_path();
  double remaining_length() const;
  void record_replan_time(double seconds);
  double horizon_length() const { return 2.0 * t_u_ * config_.robot_speed; }
  std::vector<Circle> zones_now(const DynamicEnvironment& env) const;
  bool segment_clear(const DynamicEnvironment& env, std::span<const Circle> zones, const Point2& a,
                     const Point2& b) const;
  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

  PlannerConfig config_;
  Rng rng_;
  SearchForest forest_;
  Point2 robot_{0.0, 0.0};
  Point2 goal_{0.0, 0.0};
  std::vector<NodeId> path_ids_;
  std::vector<Point2> path_;  // positions of path_ids_, next waypoint first
  double t_u_;
};

}  // namespace smarrt
