#include "smarrt/planner.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace smarrt {
namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
}

}  // namespace

void PlannerConfig::validate() const {
  require(steer_step > 0.0, "steer_step", "must be positive");
  require(goal_tolerance > 0.0, "goal_tolerance", "must be positive");
  require(robot_speed > 0.0, "robot_speed", "must be positive");
  require(t_u_init > 0.0, "t_u_init", "must be positive");
  require(t_u_smoothing > 0.0 && t_u_smoothing <= 1.0, "t_u_smoothing", "must lie in (0, 1]");
  require(r_h_min > 0.0, "r_h_min", "must be positive");
  require(r_h_max >= r_h_min, "r_h_max", "must be >= r_h_min");
  require(repair_samples_per_cell > 0, "repair_samples_per_cell", "must be positive");
  require(connect_radius > 0.0, "connect_radius", "must be positive");
  require(rewire_radius > 0.0, "rewire_radius", "must be positive");
  require(goal_bias >= 0.0 && goal_bias <= 1.0, "goal_bias", "must lie in [0, 1]");
  require(min_cell > 0.0, "min_cell", "must be positive");
  require(initial_budget > 0, "initial_budget", "must be positive");
  require(max_cell_failures > 0, "max_cell_failures", "must be positive");
  require(fallback_budget > 0, "fallback_budget", "must be positive");
  require(fallback_bias >= 0.0 && fallback_bias <= 1.0, "fallback_bias", "must lie in [0, 1]");
}

void BaselineConfig::validate() const {
  require(goal_bias >= 0.0 && goal_bias <= 1.0, "goal_bias", "must lie in [0, 1]");
  require(waypoint_bias >= 0.0 && waypoint_bias <= 1.0, "waypoint_bias", "must lie in [0, 1]");
  require(goal_bias + waypoint_bias <= 1.0, "waypoint_bias", "goal_bias + waypoint_bias must be <= 1");
  require(subtree_root_bias >= 0.0 && subtree_root_bias <= 1.0, "subtree_root_bias",
          "must lie in [0, 1]");
  require(iteration_budget > 0, "iteration_budget", "must be positive");
}

std::vector<Circle> effective_zones(std::span<const Circle> zones, const Point2& robot) {
  std::vector<Circle> out(zones.begin(), zones.end());
  for (auto& z : out) {
    const double d = dist(robot, z.center);
    if (d <= z.radius) z.radius = std::max(0.0, d - 1e-6);
  }
  return out;
}

bool hits_any(const Segment2& s, std::span<const Circle> zones) {
  return std::any_of(zones.begin(), zones.end(),
                     [&](const Circle& z) { return segment_intersects_circle(s, z); });
}

bool inside_any(const Point2& p, std::span<const Circle> zones) {
  return std::any_of(zones.begin(), zones.end(), [&](const Circle& z) { return point_in_circle(p, z); });
}

HorizonCheck check_horizon(std::span<const Point2> pts, double horizon, std::span<const Circle> zones) {
  HorizonCheck out;
  if (pts.empty()) return out;
  out.horizon_point = pts.front();
  double left = horizon;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Point2& a = pts[i];
    const Point2& b = pts[i + 1];
    const double len = dist(a, b);
    const Point2 end = len > left ? Point2(a + (b - a) * (left / len)) : b;
    if (hits_any(Segment2{a, end}, zones)) {
      out.feasible = false;
      out.blocked = i;
    }
    out.horizon_point = end;
    if (!out.feasible || len >= left) break;
    left -= len;
  }
  return out;
}

Planner::Planner(const PlannerConfig& config, std::uint64_t seed)
    : config_(config), rng_(seed), forest_(config.steer_step), t_u_(config.t_u_init) {
  config_.validate();
  t_u_ =std::clamp(config_.t_u_init, config_.r_h_min / (2.0 * config_.robot_speed),
                    config_.r_h_max / (2.0 * config_.robot_speed));
}

std::vector<Point2> Planner::path() const {
  std::vector<Point2> out;
  out.reserve(path_.size() + 1);
  out.push_back(robot_);
  out.insert(out.end(), path_.begin(), path_.end());
  return out;
}

void Planner::adopt_path(std::vector<NodeId> ids) {
  path_ids_ = std::move(ids);
  path_.clear();
  path_.reserve(path_ids_.size());
  for (NodeId id : path_ids_) path_.push_back(forest_.position(id));
}

void Planner::clear_path() {
  path_ids_.clear();
  path_.clear();
}

bool Planner::advance(double distance) {
  bool reached = false;
  std::size_t done = 0;
  while (done < path_.size()) {
    const double d = dist(robot_, path_[done]);
    if (d > distance) {
      robot_ += (path_[done] - robot_) * (distance / d);
      break;
    }
    robot_ = path_[done];
    distance -= d;
    ++done;
    reached = true;
  }
  path_.erase(path_.begin(), path_.begin() + static_cast<std::ptrdiff_t>(done));
  path_ids_.erase(path_ids_.begin(), path_ids_.begin() + static_cast<std::ptrdiff_t>(done));
  return reached;
}

double Planner::remaining_length() const {
  double total = 0.0;
  Point2 prev = robot_;
  for (const auto& p : path_) {
    total += dist(prev, p);
    prev = p;
  }
  return total;
}

void Planner::record_replan_time(double seconds) {
  const double a = config_.t_u_smoothing;
  const double lo = config_.r_h_min / (2.0 * config_.robot_speed);
  const double hi = config_.r_h_max / (2.0 * config_.robot_speed);
  t_u_ = std::clamp((1.0 - a) * t_u_ + a * seconds, lo, hi);
}

std::vector<Circle> Planner::zones_now(const DynamicEnvironment& env) const {
  const auto raw = env.collision_zones(t_u_);
  return effective_zones(raw, robot_);
}

bool Planner::segment_clear(const DynamicEnvironment& env, std::span<const Circle> zones,
                            const Point2& a, const Point2& b) const {
  const Segment2 s{a, b};
  return env.segment_free_static(s) && !hits_any(s, zones);
}

}  // namespace smarrt
