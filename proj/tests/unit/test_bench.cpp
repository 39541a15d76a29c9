#include "smarrt/bench.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace smarrt;
using nlohmann::json;

namespace {

const std::filesystem::path kSource = SMARRT_SOURCE_DIR;

json minimal_scenario() {
  return json::parse(R"({
    "id": "t",
    "bounds": {"min": [0, 0], "max": [32, 32]},
    "start": [2, 30],
    "goal": [30, 2],
    "obstacles": [{"radius": 1, "speed": 2, "position": [16, 16]}]
  })");
}

std::string error_path(const json& j) {
  try {
    parse_scenario(j);
  } catch (const InputError& e) {
    return e.path();
  }
  return "<no error>";
}

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "smarrt_bench_tests";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

CampaignConfig small_campaign() {
  CampaignConfig c;
  c.base = parse_scenario(minimal_scenario());
  c.obstacle_counts = {2};
  c.obstacle_speeds = {1.0, 2.0};
  c.scenarios_per_combination = 2;
  c.trials_per_scenario = 2;
  c.planners = {"smarrt", "errt"};
  c.master_seed = 77;
  return c;
}

std::string without_timing(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::string line, out;
  while (std::getline(in, line)) {
    // Drop the last two columns (average and total replan wall time).
    for (int k = 0; k < 2; ++k) line = line.substr(0, line.rfind(','));
    out += line + '\n';
  }
  return out;
}

}  // namespace

TEST(Scenario, ParsesAndRoundTrips) {
  const ScenarioSpec s = parse_scenario(minimal_scenario());
  EXPECT_EQ(s.id, "t");
  EXPECT_EQ(s.obstacles.size(), 1u);
  EXPECT_EQ(s.robot_speed, 4.0);
  EXPECT_EQ(s.dt, 0.05);
  const ScenarioSpec back = parse_scenario(scenario_to_json(s));
  EXPECT_EQ(scenario_to_json(back), scenario_to_json(s));
}

TEST(Scenario, ShippedFilesLoad) {
  for (const auto& entry : std::filesystem::directory_iterator(kSource / "scenarios")) {
    EXPECT_NO_THROW(load_scenario(entry.path())) << entry.path();
  }
}

TEST(Scenario, ErrorsCarryFieldPaths) {
  json j = minimal_scenario();
  j["obstacles"][0]["speed"] = -1;
  EXPECT_EQ(error_path(j), "obstacles[0].speed");

  j = minimal_scenario();
  j["obstacles"][0]["speed"] = "fast";
  EXPECT_EQ(error_path(j), "obstacles[0].speed");

  j = minimal_scenario();
  j["obstacles"][0]["position"] = {40, 5};
  EXPECT_EQ(error_path(j), "obstacles[0].position");

  j = minimal_scenario();
  j.erase("goal");
  EXPECT_EQ(error_path(j), "goal");

  j = minimal_scenario();
  j["colour"] = "red";
  EXPECT_EQ(error_path(j), "colour");

  j = minimal_scenario();
  j["statics"] = json::array({{{"type", "rect"}, {"min", {0, 0}}, {"max", {5, 32}}}});
  EXPECT_EQ(error_path(j), "start");

  j = minimal_scenario();
  j["statics"] = json::array({{{"type", "blob"}}});
  EXPECT_EQ(error_path(j), "statics[0].type");

  j = minimal_scenario();
  j["planner"] = {{"r_h_min", 9.0}};
  EXPECT_EQ(error_path(j).rfind("planner", 0), 0u);

  j = minimal_scenario();
  j["dt"] = 0;
  EXPECT_EQ(error_path(j), "dt");
}

TEST(Scenario, MalformedFileIsInputError) {
  const auto p = temp_file("bad.json");
  std::ofstream(p) << "{ not json";
  EXPECT_THROW(load_scenario(p), InputError);
  EXPECT_THROW(load_scenario(temp_file("missing.json")), InputError);
}

TEST(Seeds, StreamsAreIndependentAndStable) {
  EXPECT_EQ(derive_seed(1, 2, 0), derive_seed(1, 2, 0));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(1, 2, 1));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(1, 3, 0));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(2, 2, 0));
}

TEST(Planners, FactoryKnowsEveryName) {
  const ScenarioSpec s = parse_scenario(minimal_scenario());
  for (const auto& name : planner_names()) EXPECT_EQ(make_planner(name, s, 0)->name(), name);
  EXPECT_THROW(make_planner("astar", s, 0), std::invalid_argument);
  EXPECT_EQ(planner_names().size(), 5u);
}

TEST(Csv, HeaderAndRoundTrip) {
  EXPECT_STREQ(kCsvHeader,
               "scenario_id,planner,seed,n_obstacles,obstacle_speed,success,travel_time_s,n_replans,"
               "avg_replan_time_s,total_replan_time_s");
  TrialResult r{"n3_v1_s0", "smarrt", 7, 3, 1.5, true, 10.25, 4, 1.25e-5, 5e-5};
  const std::string line = csv_row(r);
  EXPECT_EQ(line, "n3_v1_s0,smarrt,7,3,1.5,true,10.2500,4,0.000012500,0.000050000");
  const TrialResult back = parse_csv_row(line);
  EXPECT_EQ(back.scenario_id, r.scenario_id);
  EXPECT_EQ(back.seed, 7u);
  EXPECT_EQ(back.success, true);
  EXPECT_DOUBLE_EQ(back.travel_time, 10.25);
  EXPECT_DOUBLE_EQ(back.avg_replan_time, 1.25e-5);
  EXPECT_THROW(parse_csv_row("a,b,c"), std::invalid_argument);
  EXPECT_THROW(parse_csv_row("n,smarrt,x,3,1,true,1,0,0,0"), std::invalid_argument);

  const auto p = temp_file("rows.csv");
  write_csv(p, {r, r});
  const auto rows = read_csv(p);
  ASSERT_EQ(rows.size(), 2u);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, kCsvHeader);
}

TEST(Stats, MedianAndMean) {
  EXPECT_FALSE(median({}).has_value());
  EXPECT_EQ(*median({3.0}), 3.0);
  EXPECT_EQ(*median({5.0, 1.0, 3.0}), 3.0);
  EXPECT_EQ(*median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_EQ(*mean({1.0, 2.0, 6.0}), 3.0);
  EXPECT_FALSE(mean({}).has_value());
}

TEST(Stats, SummaryGroupsAndFilters) {
  std::vector<TrialResult> rows{
      {"a", "smarrt", 0, 3, 1.0, true, 10.0, 2, 1e-5, 2e-5},
      {"a", "smarrt", 1, 3, 1.0, false, 120.0, 5, 9e-5, 4.5e-4},
      {"a", "smarrt", 2, 3, 1.0, true, 12.0, 0, 0.0, 0.0},
      {"a", "errt", 0, 3, 1.0, true, 11.0, 1, 3e-5, 3e-5},
      {"b", "smarrt", 0, 6, 1.0, false, 1.0, 0, 0.0, 0.0},
  };
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].planner, "smarrt");
  EXPECT_EQ(s[0].trials, 3);
  EXPECT_NEAR(s[0].success_rate, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(*s[0].median_travel_time, 11.0);      // successful trials only
  EXPECT_EQ(*s[0].median_avg_replan, 5e-5);       // trials that replanned only
  EXPECT_EQ(s[1].planner, "errt");
  EXPECT_EQ(s[2].n_obstacles, 6);
  EXPECT_FALSE(s[2].median_travel_time.has_value());
  EXPECT_FALSE(s[2].median_avg_replan.has_value());
  std::ostringstream os;
  print_summary(os, s);
  EXPECT_NE(os.str().find("errt"), std::string::npos);
}

TEST(Trial, EmptyWorldSucceeds) {
  ScenarioSpec s = parse_scenario(minimal_scenario());
  s.obstacles.clear();
  const auto r = run_trial(s, "smarrt", 0);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.n_replans, 0);
  EXPECT_GE(r.travel_time, (dist(s.start, s.goal) - 0.5) / 4.0 - 1e-9);
  EXPECT_LE(r.travel_time, 15.0);
}

TEST(Trial, ParkedOnGoalTimesOut) {
  const ScenarioSpec s = load_scenario(kSource / "scenarios" / "parked_on_goal.json");
  for (const auto& planner : planner_names()) {
    const auto r = run_trial(s, planner, 0);
    EXPECT_FALSE(r.success) << planner;
    EXPECT_NEAR(r.travel_time, s.max_sim_time, s.dt + 1e-9) << planner;
  }
}

TEST(Trial, DeterministicExceptTiming) {
  const ScenarioSpec s = load_scenario(kSource / "scenarios" / "crowded6.json");
  for (const auto& planner : planner_names()) {
    const auto a = run_trial(s, planner, 3);
    const auto b = run_trial(s, planner, 3);
    EXPECT_EQ(a.success, b.success) << planner;
    EXPECT_EQ(a.travel_time, b.travel_time) << planner;
    EXPECT_EQ(a.n_replans, b.n_replans) << planner;
  }
}

TEST(Trace, RecordsCarryEveryField) {
  const ScenarioSpec s = load_scenario(kSource / "scenarios" / "mild3.json");
  std::ostringstream out;
  TraceOptions opts;
  opts.out = &out;
  opts.utility = true;
  const auto r = run_trial(s, "smarrt", 1, opts);
  std::istringstream in(out.str());
  std::string line;
  int records = 0, replans = 0, with_utility = 0;
  double last_t = -1.0;
  while (std::getline(in, line)) {
    const json j = json::parse(line);
    for (const char* key : {"t", "robot", "obstacles", "path", "event", "replan_ms", "pruned", "sampling_cell"}) {
      ASSERT_TRUE(j.contains(key)) << key;
    }
    EXPECT_GT(j["t"].get<double>(), last_t);
    last_t = j["t"].get<double>();
    EXPECT_EQ(j["robot"].size(), 2u);
    EXPECT_EQ(j["obstacles"].size(), s.obstacles.size());
    for (const auto& o : j["obstacles"]) EXPECT_EQ(o.size(), 3u);
    const std::string event = j["event"];
    EXPECT_TRUE(event == "none" || event == "replan" || event == "reroute");
    if (event == "replan") ++replans;
    if (j.contains("utility")) {
      ++with_utility;
      ASSERT_EQ(j["utility"].size(), 5u);
      EXPECT_EQ(j["utility"][0].size(), 32u);
      EXPECT_EQ(j["utility"][0][0].size(), 32u);
      EXPECT_EQ(j["utility"][4].size(), 2u);
    }
    if (!j["sampling_cell"].is_null()) EXPECT_EQ(j["sampling_cell"].size(), 3u);
    ++records;
  }
  EXPECT_EQ(replans, r.n_replans);
  EXPECT_LE(with_utility, replans);
  EXPECT_EQ(records, static_cast<int>(std::llround(r.travel_time / s.dt)) + 1);
  EXPECT_EQ(last_t, r.travel_time);
}

TEST(Campaign, ParsesAndPrefixesScenarioErrors) {
  const auto c = load_campaign(kSource / "configs" / "desk_comparative.json");
  EXPECT_EQ(c.planners.size(), 5u);
  json j = json::parse(std::ifstream(kSource / "configs" / "desk_comparative.json"));
  j["scenario"]["dt"] = -1;
  try {
    parse_campaign(j);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.path(), "scenario.dt");
  }
  j = json::parse(std::ifstream(kSource / "configs" / "desk_comparative.json"));
  j["planners"][1] = "astar";
  try {
    parse_campaign(j);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.path(), "planners[1]");
  }
}

TEST(Campaign, GeneratedScenariosRespectClearance) {
  CampaignConfig c = small_campaign();
  c.obstacle_counts = {9};
  for (int i = 0; i < 20; ++i) {
    const ScenarioSpec s = generate_scenario(c, 9, 3.0, i);
    ASSERT_EQ(s.obstacles.size(), 9u);
    EXPECT_EQ(s.id, "n9_v3_s" + std::to_string(i));
    for (const auto& o : s.obstacles) {
      EXPECT_GE(dist(o.position, s.start), o.radius + c.start_clearance);
      EXPECT_GE(dist(o.position, s.goal), o.radius + c.start_clearance);
      EXPECT_EQ(o.speed, 3.0);
    }
  }
  EXPECT_EQ(scenario_to_json(generate_scenario(c, 9, 3.0, 4)), scenario_to_json(generate_scenario(c, 9, 3.0, 4)));
  EXPECT_NE(scenario_to_json(generate_scenario(c, 9, 3.0, 4)), scenario_to_json(generate_scenario(c, 9, 3.0, 5)));
}

TEST(Campaign, RowCountResumeAndDeterminism) {
  const CampaignConfig c = small_campaign();
  const auto first = temp_file("campaign_a.csv");
  const auto rows = run_campaign(c, first);
  // 1 count x 2 speeds x 2 scenarios x 2 planners x 2 seeds.
  ASSERT_EQ(rows.size(), 16u);
  EXPECT_EQ(read_csv(first).size(), 16u);
  EXPECT_EQ(rows[0].scenario_id, "n2_v1_s0");
  EXPECT_EQ(rows[0].planner, "smarrt");
  EXPECT_EQ(rows[1].seed, 1u);
  EXPECT_EQ(rows[2].planner, "errt");

  // A second run over the finished file reruns nothing.
  std::ostringstream log;
  const auto again = run_campaign(c, first, &log);
  EXPECT_TRUE(log.str().empty());
  EXPECT_EQ(again.size(), 16u);

  // Resume after a crash that kept the header and the first 5 rows.
  const auto partial = temp_file("campaign_b.csv");
  {
    std::ifstream in(first);
    std::ofstream out(partial);
    std::string line;
    for (int i = 0; i < 6 && std::getline(in, line); ++i) out << line << '\n';
  }
  std::ostringstream resumed_log;
  run_campaign(c, partial, &resumed_log);
  int rerun = 0;
  std::istringstream lines(resumed_log.str());
  for (std::string l; std::getline(lines, l);) ++rerun;
  EXPECT_EQ(rerun, 11);
  EXPECT_EQ(without_timing(first), without_timing(partial));

  // A fresh run from scratch gives the same rows.
  const auto fresh = temp_file("campaign_c.csv");
  run_campaign(c, fresh);
  EXPECT_EQ(without_timing(first), without_timing(fresh));
}

namespace {

json load_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::set<std::string> keys_of(const json& properties) {
  std::set<std::string> out;
  for (const auto& [k, v] : properties.items()) out.insert(k);
  return out;
}

// Every key present in the schema's properties, every required key present, recursively for objects.
void expect_conforms(const json& value, const json& schema, const std::string& where) {
  if (!schema.is_object() || !schema.contains("properties") || !value.is_object()) return;
  const auto allowed = keys_of(schema["properties"]);
  for (const auto& [k, v] : value.items()) {
    EXPECT_TRUE(allowed.count(k)) << where << "." << k;
    if (allowed.count(k)) expect_conforms(v, schema["properties"][k], where + "." + k);
  }
  for (const auto& k : schema.value("required", json::array())) EXPECT_TRUE(value.contains(k)) << where << "." << k;
}

}  // namespace

TEST(Schema, CsvHeaderMatchesSchemaColumns) {
  const json schema = load_json(kSource / "schemas" / "results.schema.json");
  std::string joined;
  for (const auto& c : schema["columns"]) {
    joined += (joined.empty() ? "" : ",") + c["name"].get<std::string>();
  }
  EXPECT_EQ(joined, kCsvHeader);
}

TEST(Schema, TraceRecordsMatchSchema) {
  const json schema = load_json(kSource / "schemas" / "trace_record.schema.json");
  const std::set<std::string> events(schema["properties"]["event"]["enum"].begin(),
                                     schema["properties"]["event"]["enum"].end());
  for (const std::string planner : {"smarrt", "drrt"}) {
    std::ostringstream out;
    TraceOptions opts;
    opts.out = &out;
    opts.utility = true;
    run_trial(load_scenario(kSource / "scenarios" / "mild3.json"), planner, 0, opts);
    std::istringstream in(out.str());
    for (std::string line; std::getline(in, line);) {
      const json j = json::parse(line);
      expect_conforms(j, schema, planner);
      EXPECT_TRUE(events.count(j["event"].get<std::string>()));
    }
  }
}

TEST(Schema, ScenarioDumpAndShippedFilesMatchSchema) {
  const json schema = load_json(kSource / "schemas" / "scenario.schema.json");
  expect_conforms(scenario_to_json(ScenarioSpec{}), schema, "default");
  for (const auto& entry : std::filesystem::directory_iterator(kSource / "scenarios")) {
    expect_conforms(load_json(entry.path()), schema, entry.path().filename().string());
  }
}

TEST(Schema, ShippedCampaignsMatchSchema) {
  const json schema = load_json(kSource / "schemas" / "campaign.schema.json");
  const json scenario = load_json(kSource / "schemas" / "scenario.schema.json");
  for (const auto& entry : std::filesystem::directory_iterator(kSource / "configs")) {
    const json c = load_json(entry.path());
    expect_conforms(c, schema, entry.path().filename().string());
    expect_conforms(c["scenario"], scenario, entry.path().filename().string() + ".scenario");
  }
}
