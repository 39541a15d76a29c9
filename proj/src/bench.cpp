#include "smarrt/bench.hpp"

#include "smarrt/baselines.hpp"
#include "smarrt/smarrt_planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

namespace smarrt {
namespace {

using nlohmann::json;

// Field access with path-qualified errors ------------------------------------------------

const json& require_key(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw InputError(path.empty() ? "$" : path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> known) {
  for (const auto& [k, v] : j.items()) {
    const bool ok = std::any_of(known.begin(), known.end(), [&](const char* n) { return k == n; });
    if (!ok) throw InputError(join(path, k), "unknown field");
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw InputError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(path, "must be finite");
  return v;
}

std::int64_t as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw InputError(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::uint64_t as_seed(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw InputError(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

Point2 as_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw InputError(path, "expected [x, y]");
  return Point2(as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]"));
}

json point_json(const Point2& p) { return json::array({p.x(), p.y()}); }

template <typename T>
void read_opt(const json& j, const std::string& path, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if constexpr (std::is_same_v<T, int>) {
    out = static_cast<int>(as_integer(*it, join(path, key)));
  } else {
    out = as_number(*it, join(path, key));
  }
}

PlannerConfig parse_planner(const json& j, const std::string& path, PlannerConfig c) {
  if (!j.is_object()) throw InputError(path, "expected an object");
  reject_unknown(j, path,
                 {"steer_step", "goal_tolerance", "t_u_init", "t_u_smoothing", "r_h_min", "r_h_max",
                  "repair_samples_per_cell", "connect_radius", "rewire_radius", "goal_bias",
                  "initial_budget", "max_cell_failures", "fallback_budget", "fallback_bias"});
  read_opt(j, path, "steer_step", c.steer_step);
  read_opt(j, path, "goal_tolerance", c.goal_tolerance);
  read_opt(j, path, "t_u_init", c.t_u_init);
  read_opt(j, path, "t_u_smoothing", c.t_u_smoothing);
  read_opt(j, path, "r_h_min", c.r_h_min);
  read_opt(j, path, "r_h_max", c.r_h_max);
  read_opt(j, path, "repair_samples_per_cell", c.repair_samples_per_cell);
  read_opt(j, path, "connect_radius", c.connect_radius);
  read_opt(j, path, "rewire_radius", c.rewire_radius);
  read_opt(j, path, "goal_bias", c.goal_bias);
  read_opt(j, path, "initial_budget", c.initial_budget);
  read_opt(j, path, "max_cell_failures", c.max_cell_failures);
  read_opt(j, path, "fallback_budget", c.fallback_budget);
  read_opt(j, path, "fallback_bias", c.fallback_bias);
  return c;
}

BaselineConfig parse_baseline(const json& j, const std::string& path, BaselineConfig c) {
  if (!j.is_object()) throw InputError(path, "expected an object");
  reject_unknown(j, path, {"goal_bias", "waypoint_bias", "subtree_root_bias", "iteration_budget"});
  read_opt(j, path, "goal_bias", c.goal_bias);
  read_opt(j, path, "waypoint_bias", c.waypoint_bias);
  read_opt(j, path, "subtree_root_bias", c.subtree_root_bias);
  read_opt(j, path, "iteration_budget", c.iteration_budget);
  return c;
}

// Turns "field: what" from a config validator into a path-qualified InputError.
template <typename F>
void rethrow_with_prefix(const std::string& prefix, F&& f) {
  try {
    f();
  } catch (const InputError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon == std::string::npos) throw InputError(prefix, msg);
    throw InputError(prefix + "." + msg.substr(0, colon), msg.substr(colon + 2));
  }
}

bool inside(const Rect& r, const Point2& p) {
  return p.x() >= r.min.x() && p.x() <= r.max.x() && p.y() >= r.min.y() && p.y() <= r.max.y();
}

bool disc_hits_static(const Point2& c, double r, const StaticObstacle& s) {
  if (const auto* circle = std::get_if<Circle>(&s.shape)) return dist(c, circle->center) <= circle->radius + r;
  const auto& rect = std::get<Rect>(s.shape);
  const Point2 q = c.cwiseMax(rect.min).cwiseMin(rect.max);
  return dist(c, q) <= r;
}

std::string format_double(const char* fmt, double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), fmt, v);
  return buf.data();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

// Scenario -----------------------------------------------------------------------------------

PlannerConfig ScenarioSpec::planner_config() const {
  PlannerConfig c = planner;
  c.robot_speed = robot_speed;
  c.min_cell = min_cell;
  return c;
}

void ScenarioSpec::validate() const {
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) throw InputError("bounds", "must have positive extent");
  if (!(robot_speed > 0.0)) throw InputError("robot_speed", "must be positive");
  if (!(min_cell > 0.0)) throw InputError("min_cell", "must be positive");
  if (!(dt > 0.0)) throw InputError("dt", "must be positive");
  if (!(max_sim_time > 0.0)) throw InputError("max_sim_time", "must be positive");
  if (!inside(bounds, start)) throw InputError("start", "outside bounds");
  if (!inside(bounds, goal)) throw InputError("goal", "outside bounds");
  for (std::size_t i = 0; i < statics.size(); ++i) {
    const std::string path = "statics[" + std::to_string(i) + "]";
    if (point_in_static(start, statics[i])) throw InputError("start", "inside " + path);
    if (point_in_static(goal, statics[i])) throw InputError("goal", "inside " + path);
  }
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const std::string path = "obstacles[" + std::to_string(i) + "]";
    const auto& o = obstacles[i];
    if (!(o.radius > 0.0)) throw InputError(path + ".radius", "must be positive");
    if (!(o.speed >= 0.0)) throw InputError(path + ".speed", "must be >= 0");
    const Rect inner{bounds.min.array() + o.radius, bounds.max.array() - o.radius};
    if (!inside(inner, o.position)) throw InputError(path + ".position", "body must lie inside bounds");
  }
  rethrow_with_prefix("planner", [&] { planner_config().validate(); });
  rethrow_with_prefix("baseline", [&] { baseline.validate(); });
}

ScenarioSpec parse_scenario(const json& j) {
  if (!j.is_object()) throw InputError("$", "expected an object");
  reject_unknown(j, "", {"id", "bounds", "start", "goal", "robot_speed", "min_cell", "dt", "max_sim_time",
                         "master_seed", "statics", "obstacles", "planner", "baseline"});
  ScenarioSpec s;
  if (const auto it = j.find("id"); it != j.end()) {
    if (!it->is_string()) throw InputError("id", "expected a string");
    s.id = it->get<std::string>();
  }
  const json& b = require_key(j, "", "bounds");
  reject_unknown(b, "bounds", {"min", "max"});
  s.bounds.min = as_point(require_key(b, "bounds", "min"), "bounds.min");
  s.bounds.max = as_point(require_key(b, "bounds", "max"), "bounds.max");
  s.start = as_point(require_key(j, "", "start"), "start");
  s.goal = as_point(require_key(j, "", "goal"), "goal");
  read_opt(j, "", "robot_speed", s.robot_speed);
  read_opt(j, "", "min_cell", s.min_cell);
  read_opt(j, "", "dt", s.dt);
  read_opt(j, "", "max_sim_time", s.max_sim_time);
  if (const auto it = j.find("master_seed"); it != j.end()) s.master_seed = as_seed(*it, "master_seed");

  if (const auto it = j.find("statics"); it != j.end()) {
    if (!it->is_array()) throw InputError("statics", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "statics[" + std::to_string(i) + "]";
      const json& o = (*it)[i];
      const json& type = require_key(o, path, "type");
      if (type == "rect") {
        reject_unknown(o, path, {"type", "min", "max"});
        const Point2 lo = as_point(require_key(o, path, "min"), path + ".min");
        const Point2 hi = as_point(require_key(o, path, "max"), path + ".max");
        if (lo.x() > hi.x() || lo.y() > hi.y()) throw InputError(path, "min must not exceed max");
        s.statics.push_back(StaticObstacle{Rect{lo, hi}});
      } else if (type == "circle") {
        reject_unknown(o, path, {"type", "center", "radius"});
        const Point2 c = as_point(require_key(o, path, "center"), path + ".center");
        const double r = as_number(require_key(o, path, "radius"), path + ".radius");
        if (!(r > 0.0)) throw InputError(path + ".radius", "must be positive");
        s.statics.push_back(StaticObstacle{Circle{c, r}});
      } else {
        throw InputError(path + ".type", "expected \"rect\" or \"circle\"");
      }
    }
  }
  if (const auto it = j.find("obstacles"); it != j.end()) {
    if (!it->is_array()) throw InputError("obstacles", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "obstacles[" + std::to_string(i) + "]";
      const json& o = (*it)[i];
      reject_unknown(o, path, {"radius", "speed", "position"});
      ObstacleSpec ob;
      ob.radius = as_number(require_key(o, path, "radius"), path + ".radius");
      ob.speed = as_number(require_key(o, path, "speed"), path + ".speed");
      ob.position = as_point(require_key(o, path, "position"), path + ".position");
      s.obstacles.push_back(ob);
    }
  }
  if (const auto it = j.find("planner"); it != j.end()) s.planner = parse_planner(*it, "planner", s.planner);
  if (const auto it = j.find("baseline"); it != j.end()) s.baseline = parse_baseline(*it, "baseline", s.baseline);
  s.validate();
  return s;
}

json scenario_to_json(const ScenarioSpec& s) {
  json statics = json::array();
  for (const auto& st : s.statics) {
    if (const auto* c = std::get_if<Circle>(&st.shape)) {
      statics.push_back({{"type", "circle"}, {"center", point_json(c->center)}, {"radius", c->radius}});
    } else {
      const auto& r = std::get<Rect>(st.shape);
      statics.push_back({{"type", "rect"}, {"min", point_json(r.min)}, {"max", point_json(r.max)}});
    }
  }
  json obstacles = json::array();
  for (const auto& o : s.obstacles) {
    obstacles.push_back({{"radius", o.radius}, {"speed", o.speed}, {"position", point_json(o.position)}});
  }
  const auto& p = s.planner;
  const auto& b = s.baseline;
  return {
      {"id", s.id},
      {"bounds", {{"min", point_json(s.bounds.min)}, {"max", point_json(s.bounds.max)}}},
      {"start", point_json(s.start)},
      {"goal", point_json(s.goal)},
      {"robot_speed", s.robot_speed},
      {"min_cell", s.min_cell},
      {"dt", s.dt},
      {"max_sim_time", s.max_sim_time},
      {"master_seed", s.master_seed},
      {"statics", statics},
      {"obstacles", obstacles},
      {"planner",
       {{"steer_step", p.steer_step},
        {"goal_tolerance", p.goal_tolerance},
        {"t_u_init", p.t_u_init},
        {"t_u_smoothing", p.t_u_smoothing},
        {"r_h_min", p.r_h_min},
        {"r_h_max", p.r_h_max},
        {"repair_samples_per_cell", p.repair_samples_per_cell},
        {"connect_radius", p.connect_radius},
        {"rewire_radius", p.rewire_radius},
        {"goal_bias", p.goal_bias},
        {"initial_budget", p.initial_budget},
        {"max_cell_failures", p.max_cell_failures},
        {"fallback_budget", p.fallback_budget},
        {"fallback_bias", p.fallback_bias}}},
      {"baseline",
       {{"goal_bias", b.goal_bias},
        {"waypoint_bias", b.waypoint_bias},
        {"subtree_root_bias", b.subtree_root_bias},
        {"iteration_budget", b.iteration_budget}}},
  };
}

ScenarioSpec load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("$", "cannot open " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("$", std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(j);
}

// Trials -------------------------------------------------------------------------------------

const std::vector<std::string>& planner_names() {
  static const std::vector<std::string> names{"smarrt", "errt", "drrt", "mprrt", "ebgrrt"};
  return names;
}

std::unique_ptr<Planner> make_planner(const std::string& name, const ScenarioSpec& spec, std::uint64_t seed) {
  const PlannerConfig c = spec.planner_config();
  if (name == "smarrt") return std::make_unique<SmarrtPlanner>(c, spec.bounds, seed);
  if (name == "errt") return std::make_unique<ErrtPlanner>(c, spec.baseline, seed);
  if (name == "drrt") return std::make_unique<DrrtPlanner>(c, spec.baseline, seed);
  if (name == "mprrt") return std::make_unique<MprrtPlanner>(c, spec.baseline, seed);
  if (name == "ebgrrt") return std::make_unique<EbgrrtPlanner>(c, spec.baseline, seed);
  throw std::invalid_argument("unknown planner '" + name + "'");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

DynamicEnvironment make_environment(const ScenarioSpec& spec, std::uint64_t seed) {
  DynamicEnvironment env(spec.bounds, derive_seed(spec.master_seed, seed, 0));
  for (const auto& s : spec.statics) env.add_static(s);
  for (const auto& o : spec.obstacles) {
    DynamicObstacle d;
    d.position = o.position;
    d.radius = o.radius;
    d.speed = o.speed;
    env.add_dynamic(d);
  }
  return env;
}

json trace_record(double t, const Planner& planner, const DynamicEnvironment& env, const RobotStatus& status,
                  bool with_utility) {
  json obstacles = json::array();
  for (const auto& o : env.dynamics()) obstacles.push_back({o.position.x(), o.position.y(), o.radius});
  json path = json::array();
  for (const auto& p : planner.path()) path.push_back(point_json(p));
  const char* event = status.replanned_this_tick ? "replan" : status.rerouted ? "reroute" : "none";
  json rec = {
      {"t", t},
      {"robot", point_json(status.position)},
      {"obstacles", obstacles},
      {"path", path},
      {"event", event},
      {"replan_ms", status.replan_wall_time * 1e3},
      {"pruned", status.pruned},
      {"sampling_cell", nullptr},
  };
  if (status.sampling_cell) {
    rec["sampling_cell"] = {status.sampling_cell->level, status.sampling_cell->ix, status.sampling_cell->iy};
  }
  const MultiResolutionMap* map = planner.utility_map();
  if (with_utility && map && status.replanned_this_tick) {
    json levels = json::array();
    for (int l = 0; l < map->level_count(); ++l) {
      const auto& g = map->utility_grid(l);
      json rows = json::array();
      for (Eigen::Index iy = 0; iy < g.rows(); ++iy) {
        json row = json::array();
        for (Eigen::Index ix = 0; ix < g.cols(); ++ix) row.push_back(g(iy, ix));
        rows.push_back(std::move(row));
      }
      levels.push_back(std::move(rows));
    }
    rec["utility"] = std::move(levels);
  }
  return rec;
}

TrialResult run_trial(const ScenarioSpec& spec, const std::string& name, std::uint64_t seed,
                      const TraceOptions& trace) {
  TrialResult r;
  r.scenario_id = spec.id;
  r.planner = name;
  r.seed = seed;
  r.n_obstacles = static_cast<int>(spec.obstacles.size());
  for (const auto& o : spec.obstacles) r.obstacle_speed = std::max(r.obstacle_speed, o.speed);

  DynamicEnvironment env = make_environment(spec, seed);
  auto planner = make_planner(name, spec, derive_seed(spec.master_seed, seed, 1));
  const auto emit = [&](double t, const RobotStatus& st) {
    if (trace.out) *trace.out << trace_record(t, *planner, env, st, trace.utility).dump() << '\n';
  };

  const bool planned = planner->initial_plan(env, spec.start, spec.goal);
  RobotStatus st0;
  st0.position = planner->position();
  st0.reached_goal = planner->at_goal();
  emit(0.0, st0);
  if (!planned) return r;

  const auto steps = static_cast<long>(std::ceil(spec.max_sim_time / spec.dt - 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const Point2 before = planner->position();
    const RobotStatus st = planner->tick(env, spec.dt);
    const double t = static_cast<double>(k) * spec.dt;
    if (st.replanned_this_tick) {
      ++r.n_replans;
      r.total_replan_time += st.replan_wall_time;
    }
    emit(t, st);
    r.travel_time = t;

    bool hit = env.robot_in_collision(st.position);
    for (const auto& o : env.dynamics()) {
      if (hit) break;
      hit = segment_intersects_circle(Segment2{before, st.position},
                                      Circle{o.position, o.radius + o.speed * spec.dt});
    }
    if (hit) break;
    if (st.reached_goal) {
      r.success = true;
      break;
    }
  }
  if (r.n_replans > 0) r.avg_replan_time = r.total_replan_time / r.n_replans;
  return r;
}

// CSV ----------------------------------------------------------------------------------------

std::string csv_row(const TrialResult& r) {
  std::ostringstream os;
  os << r.scenario_id << ',' << r.planner << ',' << r.seed << ',' << r.n_obstacles << ','
     << format_double("%g", r.obstacle_speed) << ',' << (r.success ? "true" : "false") << ','
     << format_double("%.4f", r.travel_time) << ',' << r.n_replans << ','
     << format_double("%.9f", r.avg_replan_time) << ',' << format_double("%.9f", r.total_replan_time);
  return os.str();
}

TrialResult parse_csv_row(const std::string& line) {
  const auto f = split_csv(line);
  if (f.size() != 10) throw std::invalid_argument("expected 10 CSV fields, got " + std::to_string(f.size()));
  TrialResult r;
  try {
    r.scenario_id = f[0];
    r.planner = f[1];
    r.seed = std::stoull(f[2]);
    r.n_obstacles = std::stoi(f[3]);
    r.obstacle_speed = std::stod(f[4]);
    if (f[5] != "true" && f[5] != "false") throw std::invalid_argument("success must be true or false");
    r.success = f[5] == "true";
    r.travel_time = std::stod(f[6]);
    r.n_replans = std::stoi(f[7]);
    r.avg_replan_time = std::stod(f[8]);
    r.total_replan_time = std::stod(f[9]);
  } catch (const std::logic_error& e) {
    throw std::invalid_argument("malformed CSV row '" + line + "': " + e.what());
  }
  return r;
}

std::vector<TrialResult> read_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument(file.string() + ": unexpected CSV header");
  }
  std::vector<TrialResult> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_csv_row(line));
  }
  return rows;
}

void write_csv(const std::filesystem::path& file, const std::vector<TrialResult>& rows) {
  const auto tmp = std::filesystem::path(file.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << kCsvHeader << '\n';
    for (const auto& r : rows) out << csv_row(r) << '\n';
  }
  std::filesystem::rename(tmp, file);
}

// Statistics ---------------------------------------------------------------------------------

std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::optional<double> mean(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& rows) {
  using Key = std::tuple<int, double, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<const TrialResult*>> groups;
  for (const auto& r : rows) {
    Key k{r.n_obstacles, r.obstacle_speed, r.planner};
    auto [it, fresh] = groups.try_emplace(k);
    if (fresh) order.push_back(k);
    it->second.push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& k : order) {
    const auto& g = groups[k];
    SummaryRow s;
    std::tie(s.n_obstacles, s.obstacle_speed, s.planner) = k;
    s.trials = static_cast<int>(g.size());
    std::vector<double> travel, replan;
    int ok = 0;
    for (const auto* r : g) {
      if (r->success) {
        ++ok;
        travel.push_back(r->travel_time);
      }
      if (r->n_replans > 0) replan.push_back(r->avg_replan_time);
    }
    s.success_rate = static_cast<double>(ok) / static_cast<double>(s.trials);
    s.median_travel_time = median(travel);
    s.median_avg_replan = median(replan);
    out.push_back(std::move(s));
  }
  return out;
}

void print_summary(std::ostream& os, const std::vector<SummaryRow>& summary) {
  const auto opt = [](const std::optional<double>& v, const char* fmt) {
    return v ? format_double(fmt, *v) : std::string("-");
  };
  os << std::left << std::setw(6) << "n" << std::setw(8) << "speed" << std::setw(10) << "planner" << std::setw(8)
     << "trials" << std::setw(10) << "success" << std::setw(14) << "travel_s" << "replan_s\n";
  for (const auto& s : summary) {
    os << std::left << std::setw(6) << s.n_obstacles << std::setw(8) << format_double("%g", s.obstacle_speed)
       << std::setw(10) << s.planner << std::setw(8) << s.trials << std::setw(10)
       << format_double("%.3f", s.success_rate) << std::setw(14) << opt(s.median_travel_time, "%.4f")
       << opt(s.median_avg_replan, "%.9f") << '\n';
  }
}

// Campaigns ----------------------------------------------------------------------------------

void CampaignConfig::validate() const {
  if (obstacle_counts.empty()) throw InputError("obstacle_counts", "must not be empty");
  for (std::size_t i = 0; i < obstacle_counts.size(); ++i) {
    if (obstacle_counts[i] < 0) throw InputError("obstacle_counts[" + std::to_string(i) + "]", "must be >= 0");
  }
  if (obstacle_speeds.empty()) throw InputError("obstacle_speeds", "must not be empty");
  for (std::size_t i = 0; i < obstacle_speeds.size(); ++i) {
    if (!(obstacle_speeds[i] >= 0.0)) throw InputError("obstacle_speeds[" + std::to_string(i) + "]", "must be >= 0");
  }
  if (!(obstacle_radius > 0.0)) throw InputError("obstacle_radius", "must be positive");
  if (scenarios_per_combination <= 0) throw InputError("scenarios_per_combination", "must be positive");
  if (trials_per_scenario <= 0) throw InputError("trials_per_scenario", "must be positive");
  if (planners.empty()) throw InputError("planners", "must not be empty");
  for (std::size_t i = 0; i < planners.size(); ++i) {
    const auto& names = planner_names();
    if (std::find(names.begin(), names.end(), planners[i]) == names.end()) {
      throw InputError("planners[" + std::to_string(i) + "]", "unknown planner '" + planners[i] + "'");
    }
  }
  if (!(start_clearance >= 0.0)) throw InputError("start_clearance", "must be >= 0");
  base.validate();
}

CampaignConfig parse_campaign(const json& j) {
  if (!j.is_object()) throw InputError("$", "expected an object");
  reject_unknown(j, "", {"scenario", "obstacle_counts", "obstacle_speeds", "obstacle_radius",
                         "scenarios_per_combination", "trials_per_scenario", "planners", "master_seed",
                         "start_clearance"});
  CampaignConfig c;
  try {
    c.base = parse_scenario(require_key(j, "", "scenario"));
  } catch (const InputError& e) {
    throw InputError("scenario." + e.path(), std::string(e.what()).substr(e.path().size() + 2));
  }
  const auto array_of = [&](const char* key) -> const json& {
    const json& a = require_key(j, "", key);
    if (!a.is_array()) throw InputError(key, "expected an array");
    return a;
  };
  c.obstacle_counts.clear();
  const json& counts = array_of("obstacle_counts");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    c.obstacle_counts.push_back(
        static_cast<int>(as_integer(counts[i], "obstacle_counts[" + std::to_string(i) + "]")));
  }
  c.obstacle_speeds.clear();
  const json& speeds = array_of("obstacle_speeds");
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    c.obstacle_speeds.push_back(as_number(speeds[i], "obstacle_speeds[" + std::to_string(i) + "]"));
  }
  c.planners.clear();
  const json& planners = array_of("planners");
  for (std::size_t i = 0; i < planners.size(); ++i) {
    if (!planners[i].is_string()) throw InputError("planners[" + std::to_string(i) + "]", "expected a string");
    c.planners.push_back(planners[i].get<std::string>());
  }
  read_opt(j, "", "obstacle_radius", c.obstacle_radius);
  c.scenarios_per_combination =
      static_cast<int>(as_integer(require_key(j, "", "scenarios_per_combination"), "scenarios_per_combination"));
  c.trials_per_scenario =
      static_cast<int>(as_integer(require_key(j, "", "trials_per_scenario"), "trials_per_scenario"));
  if (const auto it = j.find("master_seed"); it != j.end()) c.master_seed = as_seed(*it, "master_seed");
  read_opt(j, "", "start_clearance", c.start_clearance);
  c.validate();
  return c;
}

CampaignConfig load_campaign(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("$", "cannot open " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("$", std::string("malformed JSON: ") + e.what());
  }
  return parse_campaign(j);
}

std::string scenario_id(int count, double speed, int index) {
  return "n" + std::to_string(count) + "_v" + format_double("%g", speed) + "_s" + std::to_string(index);
}

ScenarioSpec generate_scenario(const CampaignConfig& config, int count, double speed, int index) {
  const auto key = (static_cast<std::uint64_t>(count) << 40) ^
                   (static_cast<std::uint64_t>(std::llround(speed * 1000.0)) << 16) ^
                   static_cast<std::uint64_t>(index);
  ScenarioSpec s = config.base;
  s.id = scenario_id(count, speed, index);
  s.master_seed = derive_seed(config.master_seed, key, 3);
  s.obstacles.clear();

  Rng rng(derive_seed(config.master_seed, key, 2));
  const double r = config.obstacle_radius;
  std::uniform_real_distribution<double> ux(s.bounds.min.x() + r, s.bounds.max.x() - r);
  std::uniform_real_distribution<double> uy(s.bounds.min.y() + r, s.bounds.max.y() - r);
  for (int k = 0; k < count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kSampleFreeAttempts && !placed; ++attempt) {
      const Point2 p(ux(rng), uy(rng));
      if (dist(p, s.start) < r + config.start_clearance || dist(p, s.goal) < r + config.start_clearance) continue;
      if (std::any_of(s.statics.begin(), s.statics.end(), [&](const auto& st) { return disc_hits_static(p, r, st); })) {
        continue;
      }
      s.obstacles.push_back(ObstacleSpec{r, speed, p});
      placed = true;
    }
    if (!placed) throw InputError("obstacle_counts", "no room to place " + std::to_string(count) + " obstacles");
  }
  s.validate();
  return s;
}

std::vector<TrialResult> run_campaign(const CampaignConfig& config, const std::filesystem::path& out,
                                      std::ostream* log) {
  config.validate();
  using Key = std::tuple<std::string, std::string, std::uint64_t>;
  std::map<Key, TrialResult> done;
  if (std::filesystem::exists(out)) {
    for (auto& r : read_csv(out)) done.emplace(Key{r.scenario_id, r.planner, r.seed}, r);
  }
  std::ofstream journal;
  const auto journal_row = [&](const TrialResult& r) {
    if (!journal.is_open()) {
      const bool fresh = !std::filesystem::exists(out);
      journal.open(out, std::ios::app);
      if (!journal) throw std::runtime_error("cannot write " + out.string());
      if (fresh) journal << kCsvHeader << '\n';
    }
    journal << csv_row(r) << '\n' << std::flush;
  };

  std::vector<TrialResult> rows;
  for (int n : config.obstacle_counts) {
    for (double v : config.obstacle_speeds) {
      for (int s = 0; s < config.scenarios_per_combination; ++s) {
        const ScenarioSpec spec = generate_scenario(config, n, v, s);
        for (const auto& planner : config.planners) {
          for (int t = 0; t < config.trials_per_scenario; ++t) {
            const auto seed = static_cast<std::uint64_t>(t);
            if (auto it = done.find(Key{spec.id, planner, seed}); it != done.end()) {
              rows.push_back(it->second);
              continue;
            }
            TrialResult r = run_trial(spec, planner, seed);
            r.obstacle_speed = v;
            journal_row(r);
            rows.push_back(r);
            if (log) *log << csv_row(r) << '\n';
          }
        }
      }
    }
  }
  if (journal.is_open()) journal.close();
  write_csv(out, rows);
  return rows;
}

}  // namespace smarrt
