#include "smarrt/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace smarrt {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Node ids of `tops` and everything below them.
std::vector<NodeId> with_descendants(const SearchForest& forest, const std::vector<NodeId>& tops) {
  std::set<NodeId> seen;
  std::vector<NodeId> stack(tops.begin(), tops.end());
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) continue;
    for (NodeId c : forest.node(id).children) stack.push_back(c);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

BaselinePlanner::BaselinePlanner(const PlannerConfig& config, const BaselineConfig& baseline,
                                 std::uint64_t seed)
    : Planner(config, seed), baseline_(baseline) {
  baseline_.validate();
}

RobotStatus BaselinePlanner::tick(DynamicEnvironment& env, double dt) {
  RobotStatus status;
  env.step(dt);
  if (!at_goal()) {
    const auto zones = zones_now(env);
    if (invalidated(env, zones)) {
      const auto t0 = Clock::now();
      const bool ok = replan(env, zones);
      status.replan_wall_time = seconds_since(t0);
      record_replan_time(status.replan_wall_time);
      status.replanned_this_tick = true;
      status.replan_failed = !ok;
      if (!ok) clear_path();
    }
    if (!path_.empty()) advance(config_.robot_speed * dt);
  }
  status.position = robot_;
  status.reached_goal = at_goal();
  return status;
}

Point2 BaselinePlanner::biased_target(const DynamicEnvironment& env, const Point2& toward) {
  const double u = uniform01();
  if (u < baseline_.goal_bias) return toward;
  if (u < baseline_.goal_bias + baseline_.waypoint_bias && !waypoint_cache_.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, waypoint_cache_.size() - 1);
    return waypoint_cache_[pick(rng_)];
  }
  return env.sample_free(rng_);
}

std::optional<NodeId> BaselinePlanner::extend(const DynamicEnvironment& env, std::span<const Circle> zones,
                                              const Point2& target,
                                              const std::function<bool(NodeId)>& from) {
  const auto near = forest_.nearest_if(target, from);
  if (!near) return std::nullopt;
  const Point2 a = forest_.position(*near);
  const Point2 q = steer(a, target, config_.steer_step);
  if (q == a || inside_any(q, zones) || !segment_clear(env, zones, a, q)) return std::nullopt;
  return forest_.insert(q, *near);
}

bool BaselinePlanner::path_blocked(const DynamicEnvironment& env, std::span<const Circle> zones) const {
  const auto pts = path();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!segment_clear(env, zones, pts[i], pts[i + 1])) return true;
  }
  return false;
}

void BaselinePlanner::remember_waypoints() {
  if (!path_.empty()) waypoint_cache_ = path_;
}

std::vector<NodeId> BaselinePlanner::colliding_nodes(std::span<const Circle> zones) const {
  std::vector<NodeId> out;
  for (NodeId id : forest_.ids()) {
    const Node& n = forest_.node(id);
    if (inside_any(n.position, zones) ||
        (n.parent && hits_any(Segment2{n.position, forest_.position(*n.parent)}, zones))) {
      out.push_back(id);
    }
  }
  return out;
}

void BaselinePlanner::adopt_from_root(NodeId leaf) {
  auto ids = forest_.extract_ids(leaf);
  std::reverse(ids.begin(), ids.end());
  ids.erase(ids.begin());
  adopt_path(std::move(ids));
}

// ---------------------------------------------------------------------------------------------
// ERRT

bool ErrtPlanner::initial_plan(const DynamicEnvironment& env, const Point2& start, const Point2& goal) {
  robot_ = start;
  goal_ = goal;
  waypoint_cache_.clear();
  clear_path();
  forest_.clear();
  return grow(env, {});
}

bool ErrtPlanner::grow(const DynamicEnvironment& env, std::span<const Circle> zones) {
  const NodeId root = forest_.insert(robot_);
  if (inside_any(goal_, zones)) return false;
  if (dist(robot_, goal_) <= config_.goal_tolerance) {
    adopt_from_root(forest_.insert(goal_, root));
    return true;
  }
  const auto any = [](NodeId) { return true; };
  for (int i = 0; i < baseline_.iteration_budget; ++i) {
    const auto q = extend(env, zones, biased_target(env, goal_), any);
    if (!q) continue;
    if (dist(forest_.position(*q), goal_) <= config_.goal_tolerance) {
      adopt_from_root(*q);
      return true;
    }
  }
  return false;
}

bool ErrtPlanner::invalidated(const DynamicEnvironment& env, std::span<const Circle> zones) {
  return path_.empty() || path_blocked(env, zones);
}

bool ErrtPlanner::replan(const DynamicEnvironment& env, std::span<const Circle> zones) {
  remember_waypoints();
  clear_path();
  forest_.clear();
  return grow(env, zones);
}

// ---------------------------------------------------------------------------------------------
// DRRT

bool DrrtPlanner::initial_plan(const DynamicEnvironment& env, const Point2& start, const Point2& goal) {
  robot_ = start;
  goal_ = goal;
  waypoint_cache_.clear();
  clear_path();
  forest_.clear();
  goal_id_ = forest_.insert(goal_);
  return grow(env, {});
}

bool DrrtPlanner::grow(const DynamicEnvironment& env, std::span<const Circle> zones) {
  const auto try_link = [&](NodeId id) {
    if (dist(forest_.position(id), robot_) > config_.goal_tolerance) return false;
    if (!segment_clear(env, zones, robot_, forest_.position(id))) return false;
    adopt_path(forest_.extract_ids(id));
    return true;
  };
  // Surviving branches may already reach the robot.
  std::optional<NodeId> best;
  double best_cost = 0.0;
  for (NodeId id : forest_.within(robot_, config_.goal_tolerance)) {
    const double cost = dist(robot_, forest_.position(id)) + forest_.cost_to_root(id);
    if (best && cost >= best_cost) continue;
    if (!segment_clear(env, zones, robot_, forest_.position(id))) continue;
    best = id;
    best_cost = cost;
  }
  if (best && try_link(*best)) return true;

  const auto any = [](NodeId) { return true; };
  for (int i = 0; i < baseline_.iteration_budget; ++i) {
    const auto q = extend(env, zones, biased_target(env, robot_), any);
    if (q && try_link(*q)) return true;
  }
  return false;
}

bool DrrtPlanner::invalidated(const DynamicEnvironment& env, std::span<const Circle> zones) {
  if (path_.empty() || inside_any(goal_, zones) || path_blocked(env, zones)) return true;
  // Colliding branches off the path hold no path node; trimming them is not a replan.
  forest_.prune(with_descendants(forest_, colliding_nodes(zones)));
  return false;
}

bool DrrtPlanner::replan(const DynamicEnvironment& env, std::span<const Circle> zones) {
  if (inside_any(goal_, zones)) {
    clear_path();
    return false;
  }
  auto doomed = with_descendants(forest_, colliding_nodes(zones));
  forest_.prune(doomed);
  remember_waypoints();
  clear_path();
  return grow(env, zones);
}

// ---------------------------------------------------------------------------------------------
// MP-RRT

bool MprrtPlanner::initial_plan(const DynamicEnvironment& env, const Point2& start, const Point2& goal) {
  robot_ = start;
  goal_ = goal;
  waypoint_cache_.clear();
  goal_node_.reset();
  clear_path();
  forest_.clear();
  return grow(env, {}, forest_.insert(robot_));
}

bool MprrtPlanner::grow(const DynamicEnvironment& env, std::span<const Circle> zones, NodeId root) {
  if (inside_any(goal_, zones)) return false;
  const auto main_label = [&] { return forest_.label(root); };
  const auto done = [&] { return goal_node_ && forest_.label(*goal_node_) == main_label(); };
  const auto in_main = [&](NodeId id) { return forest_.label(id) == main_label(); };

  // Links the goal (or the fragment holding it) to the fresh main-tree node q.
  const auto reach = [&](NodeId q) {
    const Point2 p = forest_.position(q);
    if (goal_node_) {
      const Point2 g = forest_.position(*goal_node_);
      if (dist(p, g) <= config_.steer_step && segment_clear(env, zones, p, g)) {
        forest_.reroot(*goal_node_);
        forest_.reparent(*goal_node_, q);
      }
    } else if (dist(p, goal_) <= config_.goal_tolerance) {
      goal_node_ = q;
    }
  };
  const auto reclaim = [&](NodeId q, int label) {
    const Point2 p = forest_.position(q);
    for (NodeId id : forest_.within(p, config_.steer_step)) {
      if (forest_.label(id) != label) continue;
      if (!segment_clear(env, zones, p, forest_.position(id))) continue;
      forest_.reroot(id);
      forest_.reparent(id, q);
      return;
    }
  };

  if (done()) {
    adopt_from_root(*goal_node_);
    return true;
  }
  for (int i = 0; i < baseline_.iteration_budget; ++i) {
    std::optional<int> fragment;
    Point2 target;
    const auto& roots = forest_.roots();
    if (roots.size() > 1 && uniform01() < baseline_.subtree_root_bias) {
      std::vector<NodeId> others;
      for (NodeId r : roots) {
        if (forest_.label(r) != main_label()) others.push_back(r);
      }
      std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
      const NodeId r = others[pick(rng_)];
      fragment = forest_.label(r);
      target = forest_.position(r);
    } else {
      target = biased_target(env, goal_);
    }
    const auto q = extend(env, zones, target, in_main);
    if (!q) continue;
    if (fragment) reclaim(*q, *fragment);
    if (!done()) reach(*q);
    if (done()) {
      adopt_from_root(*goal_node_);
      return true;
    }
  }
  return false;
}

bool MprrtPlanner::invalidated(const DynamicEnvironment& env, std::span<const Circle> zones) {
  if (path_.empty() || inside_any(goal_, zones) || path_blocked(env, zones)) return true;
  prune_colliding(zones);
  return false;
}

void MprrtPlanner::prune_colliding(std::span<const Circle> zones) {
  std::vector<NodeId> victims;
  std::vector<NodeId> cuts;
  for (NodeId id : colliding_nodes(zones)) {
    (inside_any(forest_.position(id), zones) ? victims : cuts).push_back(id);
  }
  if (victims.empty() && cuts.empty()) return;
  for (NodeId id : cuts) forest_.detach(id);
  forest_.prune(victims);
  if (goal_node_ && !forest_.alive(*goal_node_)) goal_node_.reset();
  forest_.floodfill_relabel();
}

bool MprrtPlanner::replan(const DynamicEnvironment& env, std::span<const Circle> zones) {
  prune_colliding(zones);
  remember_waypoints();
  clear_path();
  if (inside_any(goal_, zones)) return false;
  const NodeId root = forest_.insert(robot_);
  return grow(env, zones, root);
}

// ---------------------------------------------------------------------------------------------
// EBG-RRT

bool EbgrrtPlanner::initial_plan(const DynamicEnvironment& env, const Point2& start, const Point2& goal) {
  robot_ = start;
  goal_ = goal;
  waypoint_cache_.clear();
  clear_path();
  last_remnant_ = 0;
  forest_.clear();
  // A remnant-free replan is a plain bidirectional search from the robot to the goal.
  return replan(env, {});
}

bool EbgrrtPlanner::invalidated(const DynamicEnvironment& env, std::span<const Circle> zones) {
  return path_.empty() || path_blocked(env, zones);
}

bool EbgrrtPlanner::replan(const DynamicEnvironment& env, std::span<const Circle> zones) {
  // Usable tail of the old path: everything after its last conflict.
  const auto pts = path();
  std::size_t keep_from = pts.size();
  if (!path_.empty()) {
    keep_from = 1;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (inside_any(pts[i + 1], zones)) keep_from = i + 2;
      else if (!segment_clear(env, zones, pts[i], pts[i + 1])) keep_from = std::max(keep_from, i + 1);
    }
  }
  std::vector<Point2> remnant;
  if (keep_from < pts.size()) remnant.assign(pts.begin() + static_cast<std::ptrdiff_t>(keep_from), pts.end());
  if (!remnant.empty() && dist(remnant.back(), goal_) <= 1e-12) remnant.pop_back();

  remember_waypoints();
  clear_path();
  forest_.clear();
  last_remnant_ = remnant.size();
  if (inside_any(goal_, zones)) return false;

  // Goal-rooted chain holding the remnant, frontier (robot side) last inserted.
  NodeId frontier = forest_.insert(goal_);
  for (auto it = remnant.rbegin(); it != remnant.rend(); ++it) frontier = forest_.insert(*it, frontier);
  const NodeId root = forest_.insert(robot_);
  const int robot_label = forest_.label(root);

  const auto splice = [&](NodeId q) {
    const Point2 p = forest_.position(q);
    for (NodeId id : forest_.within(p, config_.steer_step)) {
      if (forest_.label(id) == robot_label) continue;
      if (!segment_clear(env, zones, p, forest_.position(id))) continue;
      forest_.reroot(q);
      forest_.reparent(q, id);
      adopt_path([&] {
        auto ids = forest_.extract_ids(root);
        ids.erase(ids.begin());
        return ids;
      }());
      return true;
    }
    return false;
  };

  if (splice(root)) return true;
  const auto in_robot_tree = [&](NodeId id) { return forest_.label(id) == robot_label; };
  for (int i = 0; i < baseline_.iteration_budget; ++i) {
    const double u = uniform01();
    Point2 target;
    if (u < baseline_.goal_bias) {
      target = goal_;
    } else if (u < baseline_.goal_bias + baseline_.waypoint_bias) {
      target = forest_.position(frontier);
    } else {
      target = env.sample_free(rng_);
    }
    const auto q = extend(env, zones, target, in_robot_tree);
    if (q && splice(*q)) return true;
  }
  return false;
}

}  // namespace smarrt
