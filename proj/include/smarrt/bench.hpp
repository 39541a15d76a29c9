#pragma once

#include "smarrt/environment.hpp"
#include "smarrt/planner.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace smarrt {

/// Invalid scenario or campaign input. `what()` starts with the offending field path.
class InputError : public std::invalid_argument {
 public:
  InputError(const std::string& path, const std::string& what)
      : std::invalid_argument(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ObstacleSpec {
  double radius{1.0};
  double speed{0.0};
  Point2 position{0.0, 0.0};
};

struct ScenarioSpec {
  std::string id{"scenario"};
  Rect bounds{Point2(0.0, 0.0), Point2(32.0, 32.0)};
  Point2 start{2.0, 30.0};
  Point2 goal{30.0, 2.0};
  double robot_speed{4.0};
  double min_cell{1.0};
  double dt{0.05};
  double max_sim_time{120.0};
  std::uint64_t master_seed{0};
  std::vector<StaticObstacle> statics;
  std::vector<ObstacleSpec> obstacles;
  PlannerConfig planner;    // robot_speed and min_cell are overwritten from the fields above
  BaselineConfig baseline;

  /// Throws InputError on the first violated invariant.
  void validate() const;
  PlannerConfig planner_config() const;
};

ScenarioSpec parse_scenario(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);
/// Reads, parses and validates a scenario file.
ScenarioSpec load_scenario(const std::filesystem::path& file);

struct TrialResult {
  std::string scenario_id;
  std::string planner;
  std::uint64_t seed{0};
  int n_obstacles{0};
  double obstacle_speed{0.0};
  bool success{false};
  double travel_time{0.0};
  int n_replans{0};
  double avg_replan_time{0.0};
  double total_replan_time{0.0};
};

/// Names accepted by make_planner, in report order.
const std::vector<std::string>& planner_names();
/// Throws std::invalid_argument for an unknown name.
std::unique_ptr<Planner> make_planner(const std::string& name, const ScenarioSpec& spec, std::uint64_t seed);

/// Independent 64-bit stream seed from (master, trial seed, stream index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t seed, std::uint32_t stream);
/// Environment populated from the scenario and seeded for the given trial.
DynamicEnvironment make_environment(const ScenarioSpec& spec, std::uint64_t seed);

struct TraceOptions {
  std::ostream* out{nullptr};
  bool utility{false};  // dump the utility pyramid on ticks that searched the map
};

/// One JSONL record: t, robot, obstacles, path, event, replan_ms, pruned, sampling_cell
/// and, when requested, utility.
nlohmann::json trace_record(double t, const Planner& planner, const DynamicEnvironment& env,
                            const RobotStatus& status, bool with_utility);

TrialResult run_trial(const ScenarioSpec& spec, const std::string& planner, std::uint64_t seed,
                      const TraceOptions& trace = {});

// CSV ---------------------------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "scenario_id,planner,seed,n_obstacles,obstacle_speed,success,travel_time_s,n_replans,"
    "avg_replan_time_s,total_replan_time_s";

std::string csv_row(const TrialResult& r);
/// Throws std::invalid_argument on a malformed line.
TrialResult parse_csv_row(const std::string& line);
std::vector<TrialResult> read_csv(const std::filesystem::path& file);
void write_csv(const std::filesystem::path& file, const std::vector<TrialResult>& rows);

// Statistics ---------------------------------------------------------------------------------

/// Median of the values (mean of the middle pair for even counts); nullopt when empty.
std::optional<double> median(std::vector<double> values);
std::optional<double> mean(const std::vector<double>& values);

struct SummaryRow {
  int n_obstacles{0};
  double obstacle_speed{0.0};
  std::string planner;
  int trials{0};
  double success_rate{0.0};
  std::optional<double> median_travel_time;  // over successful trials
  std::optional<double> median_avg_replan;   // over trials that replanned at least once
};

/// One row per (n_obstacles, obstacle_speed, planner), in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<TrialResult>& rows);
void print_summary(std::ostream& os, const std::vector<SummaryRow>& summary);

// Campaigns ----------------------------------------------------------------------------------

struct CampaignConfig {
  ScenarioSpec base;
  std::vector<int> obstacle_counts{3};
  std::vector<double> obstacle_speeds{1.0};
  double obstacle_radius{1.0};
  int scenarios_per_combination{1};
  int trials_per_scenario{1};
  std::vector<std::string> planners{"smarrt"};
  std::uint64_t master_seed{0};
  double start_clearance{3.0};  // minimum gap between an obstacle body and the start or goal

  void validate() const;
};

CampaignConfig parse_campaign(const nlohmann::json& j);
CampaignConfig load_campaign(const std::filesystem::path& file);

/// Scenario `index` of the (count, speed) combination; obstacle placement is fixed by the
/// campaign seed.
ScenarioSpec generate_scenario(const CampaignConfig& config, int count, double speed, int index);
std::string scenario_id(int count, double speed, int index);

/// Runs every (scenario, planner, seed) row not already present in `out`, then rewrites
/// `out` in plan order. Progress lines go to `log` when given.
std::vector<TrialResult> run_campaign(const CampaignConfig& config, const std::filesystem::path& out,
                                      std::ostream* log = nullptr);

}  // namespace smarrt
