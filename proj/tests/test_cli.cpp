#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vsafe/cli/commands.hpp"

namespace fs = std::filesystem;
using namespace vsafe;

namespace {

struct Result {
  int code = -1;
  std::string output;  ///< stdout and stderr
};

Result run(const std::string& args) {
  const std::string cmd = std::string(VSAFE_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string scenario(const char* name) {
  return std::string(VSAFE_SOURCE_DIR) + "/scenarios/" + name;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("vsafe_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("simulate").code, 2);
  const auto missing = run("simulate --config /nonexistent/scenario.json");
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.output.find("/nonexistent/scenario.json"), std::string::npos);
}

TEST(Cli, InvalidConfigNamesTheField) {
  const auto dir = scratch("badcfg");
  std::ofstream(dir / "bad.json") << R"({"channel": {"per": 2.0}})";
  const auto r = run("validate --config " + (dir / "bad.json").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("/channel/per"), std::string::npos) << r.output;
}

TEST(Cli, ValidatePassesAndDetectsInjectedNondeterminism) {
  const auto ok = run("validate --config " + scenario("smoke.json"));
  EXPECT_EQ(ok.code, 0) << ok.output;
  EXPECT_NE(ok.output.find("deterministic"), std::string::npos);
  const auto bad = run("validate --inject-nondeterminism --config " + scenario("smoke.json"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.output.find("MISMATCH"), std::string::npos);
  EXPECT_EQ(run("validate --config " + scenario("empty.json")).code, 0);
}

TEST(Cli, SimulateThenReportReproducesTheReport) {
  const auto dir = scratch("sim");
  const auto sim = run("simulate --config " + scenario("smoke.json") + " --seeds 2 --out " +
                       (dir / "run").string());
  ASSERT_EQ(sim.code, 0) << sim.output;
  for (const char* f : {"report.json", "table.txt", "headway_density.csv",
                        "headway_at_warning_ecdf.csv", "ttc_at_warning_ecdf.csv",
                        "logs/nhtsa_intermediate_seed1.ndjson",
                        "logs/nhtsa_intermediate_seed2.ndjson"})
    EXPECT_TRUE(fs::exists(dir / "run" / f)) << f;

  const auto rep = run("report " + (dir / "run" / "logs").string() + " --out " +
                       (dir / "again").string());
  ASSERT_EQ(rep.code, 0) << rep.output;
  EXPECT_EQ(slurp(dir / "run" / "report.json"), slurp(dir / "again" / "report.json"));
  EXPECT_EQ(slurp(dir / "run" / "table.txt"), slurp(dir / "again" / "table.txt"));

  EXPECT_EQ(run("report " + (dir / "nothing").string()).code, 2);
}

TEST(Cli, FisCurve) {
  const auto dir = scratch("fis");
  const auto r = run("fis-curve --points 5 --out " + (dir / "fis.csv").string());
  ASSERT_EQ(r.code, 0) << r.output;
  std::istringstream in(slurp(dir / "fis.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y");
  std::vector<std::pair<double, double>> pts;
  while (std::getline(in, line)) {
    const auto c = line.find(',');
    pts.emplace_back(std::stod(line.substr(0, c)), std::stod(line.substr(c + 1)));
  }
  ASSERT_EQ(pts.size(), 5u);
  EXPECT_DOUBLE_EQ(pts[0].first, -1.0);
  EXPECT_NEAR(pts[0].second, -0.9, 1e-9);
  EXPECT_NEAR(pts[2].second, 0.0, 1e-12);
  EXPECT_NEAR(pts[4].second, 0.9, 1e-9);
  EXPECT_EQ(run("fis-curve --points 1").code, 2);
}

TEST(Cli, AnalyzeWritesALoadablePopulation) {
  const auto dir = scratch("analyze");
  std::ofstream csv(dir / "traj.csv");
  csv << "Vehicle_ID,Frame_ID,Local_Y,v_Length,v_Vel,v_Acc,Preceding\n";
  // 40 followers at headways 1.6 .. 3.55 s behind their own leaders, 60 ft/s.
  for (int i = 0; i < 40; ++i) {
    const double tau = 1.6 + 0.05 * i;
    for (int k = 0; k < 60; ++k) {
      const double y = 6.0 * k;
      const double a = (k / 10) % 2 ? 5.0 + 0.1 * i : -(5.0 + 0.1 * i);
      csv << 2 * i + 1 << ',' << k << ',' << y << ",15,60," << a << ',' << 2 * i + 2 << '\n';
      csv << 2 * i + 2 << ',' << k << ',' << y + 60.0 * tau + 15.0 << ",15,60,0,0\n";
    }
  }
  csv.close();
  const auto out = dir / "pop.json";
  const auto r = run("analyze " + (dir / "traj.csv").string() + " --out " + out.string() +
                     " --figures " + (dir / "fig").string());
  ASSERT_EQ(r.code, 0) << r.output;
  const auto pop = io::load_population(out.string());
  EXPECT_NEAR(pop.gamma_shape * pop.gamma_scale, 1.6 + 0.05 * 19.5, 1e-6);
  EXPECT_TRUE(fs::exists(dir / "fig" / "headway_histogram.csv"));
  EXPECT_TRUE(fs::exists(dir / "fig" / "accel_ecdf.csv"));
  EXPECT_EQ(run("analyze /nonexistent.csv").code, 2);
}

TEST(Cli, ParseSeeds) {
  EXPECT_EQ(cli::parse_seeds("3"), (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(cli::parse_seeds("7,9"), (std::vector<std::uint64_t>{7, 9}));
  EXPECT_THROW(cli::parse_seeds("0"), cli::UsageError);
  EXPECT_THROW(cli::parse_seeds("1,x"), cli::UsageError);
  EXPECT_THROW(cli::parse_seeds(""), cli::UsageError);
  EXPECT_EQ(cli::log_name(safety::FcwKind::Camp, 4), "camp_seed4.ndjson");
}
