#include "smarrt/smarrt_planner.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

namespace smarrt {
namespace {

constexpr int kMaxRepairRounds = 64;
constexpr double kImprovement = 1e-6;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

SmarrtPlanner::SmarrtPlanner(const PlannerConfig& config, const Rect& bounds, std::uint64_t seed)
    : Planner(config, seed), map_(bounds, config.min_cell) {}

void SmarrtPlanner::reset_tree(const Point2& robot, const Point2& goal) {
  forest_.clear();
  map_.clear_nodes();
  clear_path();
  robot_ = robot;
  goal_ = goal;
  goal_id_ = add_node(goal, std::nullopt);
}

NodeId SmarrtPlanner::add_node(const Point2& p, std::optional<NodeId> parent) {
  const NodeId id = forest_.insert(p, parent);
  map_.index_node(id, p, forest_.label(id));
  return id;
}

void SmarrtPlanner::relabel() {
  forest_.floodfill_relabel();
  map_.refresh_labels([this](NodeId id) { return forest_.label(id); });
}

void SmarrtPlanner::build_map() {
  map_.mark_validity();
  map_.compute_utilities(robot_, goal_);
}

bool SmarrtPlanner::initial_plan(const DynamicEnvironment& env, const Point2& start, const Point2& goal) {
  reset_tree(start, goal);
  if (dist(start, goal) <= config_.goal_tolerance) {
    adopt_path({goal_id_});
    return true;
  }
  for (int i = 0; i < config_.initial_budget; ++i) {
    const Point2 target = uniform01() < config_.goal_bias ? start : env.sample_free(rng_);
    const NodeId near = forest_.nearest(target);
    const Point2 q = steer(forest_.position(near), target, config_.steer_step);
    if (!env.segment_free_static(Segment2{forest_.position(near), q})) continue;
    const NodeId id = add_node(q, near);
    if (dist(q, start) <= config_.goal_tolerance && env.segment_free_static(Segment2{start, q})) {
      adopt_path(forest_.extract_ids(id));
      return true;
    }
  }
  return false;
}

bool SmarrtPlanner::check_feasibility(const DynamicEnvironment& env) const {
  if (path_.empty()) return at_goal();
  const auto pts = path();
  return check_horizon(pts, horizon_length(), zones_now(env)).feasible;
}

double SmarrtPlanner::horizon_radius() const {
  const auto pts = path();
  const Point2 p_f = check_horizon(pts, horizon_length(), {}).horizon_point;
  return std::clamp(dist(robot_, p_f), config_.r_h_min, config_.r_h_max);
}

std::size_t SmarrtPlanner::prune_risky(const DynamicEnvironment& env) {
  const auto zones = env.collision_zones(t_u_);
  std::vector<NodeId> victims;
  for (NodeId id : forest_.within(robot_, horizon_radius())) {
    if (inside_any(forest_.position(id), zones)) victims.push_back(id);
  }
  for (NodeId id : victims) map_.remove_node(id, forest_.position(id));
  const std::size_t removed = forest_.prune(victims);
  relabel();
  return removed;
}

std::vector<int> SmarrtPlanner::robot_labels(const DynamicEnvironment& env,
                                             std::span<const Circle> zones) const {
  std::vector<int> labels;
  for (NodeId id : forest_.within(robot_, config_.connect_radius)) {
    const int l = forest_.label(id);
    if (std::find(labels.begin(), labels.end(), l) != labels.end()) continue;
    if (segment_clear(env, zones, robot_, forest_.position(id))) labels.push_back(l);
  }
  return labels;
}

bool SmarrtPlanner::robot_has_anchor(const DynamicEnvironment& env, std::span<const Circle> zones) const {
  return !robot_labels(env, zones).empty();
}

std::optional<std::vector<NodeId>> SmarrtPlanner::connect_robot(const DynamicEnvironment& env,
                                                                std::span<const Circle> zones) const {
  const int goal_label = forest_.label(goal_id_);
  std::optional<NodeId> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (NodeId id : forest_.within(robot_, config_.connect_radius)) {
    if (forest_.label(id) != goal_label) continue;
    const double cost = dist(robot_, forest_.position(id)) + forest_.cost_to_root(id);
    if (cost >= best_cost) continue;
    if (!segment_clear(env, zones, robot_, forest_.position(id))) continue;
    best = id;
    best_cost = cost;
  }
  if (!best) return std::nullopt;
  return forest_.extract_ids(*best);
}

std::optional<NodeId> SmarrtPlanner::blocked_edge(std::span<const NodeId> ids,
                                                  std::span<const Circle> zones) const {
  std::vector<Point2> pts{robot_};
  for (NodeId id : ids) pts.push_back(forest_.position(id));
  const auto check = check_horizon(pts, horizon_length(), zones);
  if (check.feasible) return std::nullopt;
  // Segment i joins pts[i] and pts[i + 1]; the robot-side end of a tree edge is ids[i - 1].
  const std::size_t i = *check.blocked;
  return i == 0 ? ids.front() : ids[i - 1];
}

bool SmarrtPlanner::sample_in_cell(const CellIndex& cell, const DynamicEnvironment& env,
                                   std::span<const Circle> zones) {
  const Rect r = map_.cell_rect(cell);
  const Rect& b = map_.bounds();
  std::uniform_real_distribution<double> ux(std::max(r.min.x(), b.min.x()), std::min(r.max.x(), b.max.x()));
  std::uniform_real_distribution<double> uy(std::max(r.min.y(), b.min.y()), std::min(r.max.y(), b.max.y()));
  const int goal_label = forest_.label(goal_id_);

  for (int k = 0; k < config_.repair_samples_per_cell; ++k) {
    const Point2 s(ux(rng_), uy(rng_));
    if (!env.point_free_static(s) || inside_any(s, zones)) continue;

    // Nearest reachable node of every tree within reach.
    std::vector<std::pair<int, NodeId>> links;
    for (NodeId id : forest_.within(s, config_.connect_radius)) {
      const int l = forest_.label(id);
      const bool seen = std::any_of(links.begin(), links.end(), [&](const auto& e) { return e.first == l; });
      if (seen) continue;
      if (segment_clear(env, zones, s, forest_.position(id))) links.emplace_back(l, id);
    }
    if (links.empty()) continue;

    auto primary = std::find_if(links.begin(), links.end(), [&](const auto& e) { return e.first == goal_label; });
    if (primary == links.end()) primary = links.begin();
    const NodeId sid = add_node(s, primary->second);
    for (auto it = links.begin(); it != links.end(); ++it) {
      if (it == primary) continue;
      forest_.reroot(it->second);
      forest_.reparent(it->second, sid);
    }
    if (links.size() >= 2) return true;
  }
  return false;
}

std::optional<std::vector<NodeId>> SmarrtPlanner::grow_fallback(const DynamicEnvironment& env,
                                                                std::span<const Circle> zones) {
  if (!robot_has_anchor(env, zones)) add_node(robot_, std::nullopt);
  std::vector<int> from = robot_labels(env, zones);
  std::vector<NodeId> goal_side;
  const auto refresh = [&] {
    from = robot_labels(env, zones);
    goal_side.clear();
    const int goal_label = forest_.label(goal_id_);
    for (NodeId id : forest_.ids()) {
      if (forest_.label(id) == goal_label) goal_side.push_back(id);
    }
  };
  refresh();

  for (int i = 0; i < config_.fallback_budget && !from.empty(); ++i) {
    Point2 target;
    if (!goal_side.empty() && uniform01() < config_.fallback_bias) {
      std::uniform_int_distribution<std::size_t> pick(0, goal_side.size() - 1);
      target = forest_.position(goal_side[pick(rng_)]);
    } else {
      target = env.sample_free(rng_);
    }
    const auto near = forest_.nearest_if(target, [&](NodeId id) {
      return std::find(from.begin(), from.end(), forest_.label(id)) != from.end();
    });
    if (!near) break;
    const Point2 q = steer(forest_.position(*near), target, config_.steer_step);
    if (inside_any(q, zones) || !segment_clear(env, zones, forest_.position(*near), q)) continue;
    const NodeId qid = add_node(q, *near);

    const int goal_label = forest_.label(goal_id_);
    for (NodeId g : forest_.within(q, config_.connect_radius)) {
      if (forest_.label(g) != goal_label || !segment_clear(env, zones, q, forest_.position(g))) continue;
      forest_.reroot(qid);
      forest_.reparent(qid, g);
      relabel();
      if (auto ids = connect_robot(env, zones)) {
        if (auto cut = blocked_edge(*ids, zones)) {
          forest_.detach(*cut);
          relabel();
        } else {
          return ids;
        }
      }
      refresh();
      break;
    }
  }
  return std::nullopt;
}

std::optional<std::vector<NodeId>> SmarrtPlanner::repair(const DynamicEnvironment& env) {
  const auto zones = zones_now(env);
  last_sampling_cell_.reset();
  if (inside_any(goal_, zones)) {
    clear_path();
    return std::nullopt;
  }
  if (!forest_.alive(goal_id_)) {
    goal_id_ = add_node(goal_, std::nullopt);
    relabel();
  }

  std::vector<CellIndex> masked;
  bool fresh = false;
  int failures = 0;
  std::optional<std::vector<NodeId>> result;
  for (int round = 0; round < kMaxRepairRounds && !result; ++round) {
    if (auto ids = connect_robot(env, zones)) {
      if (auto cut = blocked_edge(*ids, zones)) {
        forest_.detach(*cut);
        relabel();
        fresh = false;
        continue;
      }
      result = std::move(ids);
      break;
    }
    if (!robot_has_anchor(env, zones)) {
      add_node(robot_, std::nullopt);
      fresh = false;
    }
    if (!fresh) {
      build_map();
      for (const auto& c : masked) map_.suppress(c);
      fresh = true;
    }
    const auto cell = map_.search_sampling_cell(map_.cell_of(robot_));
    if (!cell) break;
    last_sampling_cell_ = cell;
    if (sample_in_cell(*cell, env, zones)) {
      relabel();
      fresh = false;
    } else {
      map_.suppress(*cell);
      masked.push_back(*cell);
      if (++failures >= config_.max_cell_failures) break;
    }
  }
  if (!result) result = grow_fallback(env, zones);
  if (result) {
    adopt_path(*result);
  } else {
    clear_path();
  }
  return result;
}

bool SmarrtPlanner::better_path_search(const DynamicEnvironment& env) {
  if (path_.empty() || !forest_.alive(goal_id_)) return false;
  const auto zones = zones_now(env);
  const int goal_label = forest_.label(goal_id_);
  const double current = remaining_length();

  std::vector<std::pair<double, NodeId>> options;
  for (NodeId id : forest_.within(robot_, config_.rewire_radius)) {
    if (forest_.label(id) != goal_label) continue;
    const double cost = dist(robot_, forest_.position(id)) + forest_.cost_to_root(id);
    if (cost < current - kImprovement) options.emplace_back(cost, id);
  }
  std::sort(options.begin(), options.end());
  for (const auto& [cost, id] : options) {
    if (!segment_clear(env, zones, robot_, forest_.position(id))) continue;
    adopt_path(forest_.extract_ids(id));
    return true;
  }
  return false;
}

RobotStatus SmarrtPlanner::tick(DynamicEnvironment& env, double dt) {
  RobotStatus status;
  env.step(dt);
  if (!at_goal()) {
    if (check_feasibility(env)) {
      if (advance(config_.robot_speed * dt) && !at_goal()) status.rerouted = better_path_search(env);
    } else {
      const auto t0 = Clock::now();
      status.pruned = prune_risky(env);
      const bool ok = repair(env).has_value();
      status.replan_wall_time = seconds_since(t0);
      record_replan_time(status.replan_wall_time);
      status.replanned_this_tick = true;
      status.replan_failed = !ok;
      status.sampling_cell = last_sampling_cell_;
      if (ok) advance(config_.robot_speed * dt);
    }
  }
  status.position = robot_;
  status.reached_goal = at_goal();
  return status;
}

}  // namespace smarrt
