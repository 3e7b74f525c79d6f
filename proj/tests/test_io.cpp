#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "vsafe/engine/scenario.hpp"
#include "vsafe/io/config_json.hpp"
#include "vsafe/io/event_log.hpp"
#include "vsafe/io/report.hpp"

using namespace vsafe;
using vsafe::io::json;

namespace {

std::string error_path(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

engine::ScenarioConfig quick_config() {
  engine::ScenarioConfig c;
  c.n_vehicles = 30;
  c.track_length = 400.0;
  c.duration = 40.0;
  c.warmup = 5.0;
  c.fcw = safety::FcwConfig::for_kind(safety::FcwKind::Camp);
  return c;
}

}  // namespace

TEST(ConfigJson, DefaultsRoundTrip) {
  const engine::ScenarioConfig c;
  const auto j = io::to_json(c);
  const auto back = io::scenario_from_json(j);
  EXPECT_EQ(io::to_json(back), j);
  EXPECT_EQ(io::config_hash(back), io::config_hash(c));
}

TEST(ConfigJson, ModifiedFieldsRoundTrip) {
  auto c = quick_config();
  c.channel.per = 0.25;
  c.block_range = {12.0, 14.0};
  c.population.class_ratios = {0.2, 0.5, 0.3};
  c.driver.reaction_time = 0.9;
  c.fcw.camp.c0 = 0.5;
  const auto back = io::scenario_from_json(io::to_json(c));
  EXPECT_EQ(back.channel.per, 0.25);
  EXPECT_EQ(back.block_range.lo, 12.0);
  EXPECT_EQ(back.population.class_ratios[1], 0.5);
  EXPECT_EQ(back.driver.reaction_time, 0.9);
  EXPECT_EQ(back.fcw.kind, safety::FcwKind::Camp);
  EXPECT_EQ(back.fcw.camp.c0, 0.5);
  EXPECT_EQ(io::config_hash(back), io::config_hash(c));
  EXPECT_NE(io::config_hash(back), io::config_hash(engine::ScenarioConfig{}));
}

TEST(ConfigJson, PartialDocumentKeepsDefaults) {
  const auto c = io::scenario_from_json(json::parse(R"({"duration": 60, "channel": {"per": 0.1}})"));
  EXPECT_EQ(c.duration, 60.0);
  EXPECT_EQ(c.channel.per, 0.1);
  EXPECT_EQ(c.channel.tx_rate, 10.0);
  EXPECT_EQ(c.n_vehicles, 150);
}

TEST(ConfigJson, ErrorsCarryTheFieldPath) {
  auto parse = [](const char* s) { return [s] { io::scenario_from_json(json::parse(s)); }; };
  EXPECT_EQ(error_path(parse(R"({"durration": 60})")), "/durration");
  EXPECT_EQ(error_path(parse(R"({"duration": "long"})")), "/duration");
  EXPECT_EQ(error_path(parse(R"({"channel": {"per": 1.5}})")), "/channel/per");
  EXPECT_EQ(error_path(parse(R"({"channel": {"loss": 0.1}})")), "/channel/loss");
  EXPECT_EQ(error_path(parse(R"({"n_vehicles": 2.5})")), "/n_vehicles");
  EXPECT_EQ(error_path(parse(R"({"fcw": {"kind": "nhtsa"}})")), "/fcw/kind");
  EXPECT_EQ(error_path(parse(R"({"block_range": [20, 10]})")), "/block_range");
  EXPECT_EQ(error_path(parse(R"([1, 2])")), "/");
}

TEST(ConfigJson, PopulationRatiosMustSumToOne) {
  const auto doc = json::parse(R"({"population": {"class_ratios": {"aggressive": 0.3}}})");
  EXPECT_EQ(error_path([&] { io::scenario_from_json(doc); }), "/population/class_ratios");
}

TEST(ConfigJson, ExperimentFields) {
  const auto e = io::experiment_from_json(json::parse(
      R"({"description": "x", "sweep": ["none", "camp"], "seeds": [3, 4], "duration": 10})"));
  ASSERT_EQ(e.algorithms().size(), 2u);
  EXPECT_EQ(e.algorithms()[1], safety::FcwKind::Camp);
  EXPECT_EQ(e.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(error_path([] { io::experiment_from_json(json::parse(R"({"sweep": ["fast"]})")); }),
            "/sweep/0");
  EXPECT_EQ(error_path([] { io::experiment_from_json(json::parse(R"({"seeds": [-1]})")); }),
            "/seeds/0");
}

TEST(ConfigJson, BundledScenariosLoad) {
  for (const char* name : {"table2.json", "smoke.json", "empty.json"}) {
    const auto path = std::string(VSAFE_SOURCE_DIR) + "/scenarios/" + name;
    EXPECT_NO_THROW(io::load_experiment(path)) << name;
  }
  EXPECT_EQ(io::load_experiment(std::string(VSAFE_SOURCE_DIR) + "/scenarios/table2.json")
                .algorithms()
                .size(),
            5u);
}

TEST(ConfigJson, MalformedFileIsAConfigError) {
  const auto path = std::filesystem::temp_directory_path() / "vsafe_bad.json";
  std::ofstream(path) << "{\"duration\": ";
  EXPECT_THROW(io::load_experiment(path.string()), ConfigError);
  EXPECT_THROW(io::load_experiment("/nonexistent/x.json"), std::runtime_error);
}

TEST(PopulationFile, RoundTrip) {
  PopulationSpec p;
  p.gamma_shape = 7.5;
  p.class_ratios = {0.25, 0.45, 0.30};
  p.accel[2] = {1.0, 2.0};
  const auto path = (std::filesystem::temp_directory_path() / "vsafe_pop.json").string();
  io::save_population(p, path);
  const auto back = io::load_population(path);
  EXPECT_EQ(back.gamma_shape, 7.5);
  EXPECT_EQ(back.class_ratios, p.class_ratios);
  EXPECT_EQ(back.accel[2].hi, 2.0);
  EXPECT_EQ(back.decel[0].lo, p.decel[0].lo);
}

TEST(PopulationFile, BadRatiosRejectedOnLoad) {
  const auto path = (std::filesystem::temp_directory_path() / "vsafe_pop_bad.json").string();
  std::ofstream(path) << R"({"class_ratios": {"aggressive": 0.5, "normal": 0.5, "conservative": 0.5}})";
  EXPECT_EQ(error_path([&] { io::load_population(path); }), "/class_ratios");
}

TEST(EventLog, RoundTripIsExact) {
  const auto run = engine::run_scenario(quick_config(), "abc");
  const auto text = io::event_log_string(run.log);
  std::istringstream in(text);
  const auto back = io::read_event_log(in);
  ASSERT_EQ(back.size(), run.log.size());
  EXPECT_EQ(io::event_log_string(back), text);
  EXPECT_EQ(io::to_json(engine::aggregate_log(back)), io::to_json(run.report));
  EXPECT_EQ(std::get<engine::RunHeader>(back.front()).config_hash, "abc");
}

TEST(EventLog, ReportFromDiskEqualsLiveReport) {
  const auto c = quick_config();
  const auto runs = engine::run_seeds(c, {1, 2});
  const auto dir = std::filesystem::temp_directory_path() / "vsafe_logs";
  std::filesystem::create_directories(dir);
  std::vector<engine::MetricsReport> live, disk;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto p = (dir / ("run" + std::to_string(i) + ".ndjson")).string();
    io::save_event_log(runs[i].log, p);
    live.push_back(runs[i].report);
    disk.push_back(engine::aggregate_log(io::load_event_log(p)));
  }
  EXPECT_EQ(io::to_json(engine::aggregate_runs(live)), io::to_json(engine::aggregate_runs(disk)));
}

TEST(EventLog, ErrorsNameTheLine) {
  std::istringstream in("{\"type\":\"footer\",\"t_end\":1,\"collisions\":0,\"warnings\":0}\n{\"type\":\"bogus\"}\n");
  try {
    io::read_event_log(in, "x.ndjson");
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("x.ndjson:2"), std::string::npos) << e.what();
  }
}

TEST(Report, TableAndCsvShapes) {
  const auto c = quick_config();
  std::vector<engine::MetricsReport> reports;
  for (auto& r : engine::run_seeds(c, {1, 2})) reports.push_back(r.report);
  const auto all = io::aggregate_by_algorithm(reports);
  ASSERT_EQ(all.size(), 1u);
  std::ostringstream table, csv;
  io::write_table(table, all);
  io::write_headway_csv(csv, all);
  EXPECT_NE(table.str().find(std::string(safety::display_name(safety::FcwKind::Camp))), std::string::npos);
  std::istringstream lines(csv.str());
  std::string header, line;
  std::getline(lines, header);
  EXPECT_EQ(header, "algorithm,bin_lo,bin_hi,count,density");
  std::uint64_t count = 0;
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    const auto parts = line.substr(line.find(',') + 1);
    std::istringstream f(parts);
    std::string lo, hi, n;
    std::getline(f, lo, ',');
    std::getline(f, hi, ',');
    std::getline(f, n, ',');
    count += std::stoull(n);
  }
  EXPECT_EQ(rows, 20);
  EXPECT_EQ(count + all[0].headway.overflow, all[0].headway.total());
}
