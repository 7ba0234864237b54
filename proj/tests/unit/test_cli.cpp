#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace sfm;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sfmsim");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Invocation r;
  r.code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sfm_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scenario(const char* name) { return (fs::path(SFM_SCENARIO_DIR) / name).string(); }

fs::path write_scenario(const std::string& name, const std::string& body) {
  const fs::path p = fs::temp_directory_path() / ("sfm_cli_test_" + name + ".json");
  std::ofstream(p) << body;
  return p;
}

const char* kTwoGroups = R"({
  "version": 1, "name": "two_groups",
  "defaults": {"duration": 4},
  "geometry": {"walls": [{"a": [0, 0], "b": [10, 0]}, {"a": [0, 4], "b": [10, 4]}, {"a": [10, 0], "b": [10, 1.5]},
                         {"a": [10, 2.5], "b": [10, 4]}]},
  "exits": [{"id": "e", "a": [10, 1.5], "b": [10, 2.5]}],
  "population": [{"region": {"min": [1, 1], "max": [6, 3]}, "count": 8, "f": 0, "D": 0.2,
                  "route_target": [10, 2]}]
})";

}  // namespace

TEST_CASE("run writes trajectory and metrics") {
  const fs::path out = scratch("run");
  const Invocation r = invoke({"run", "--scenario", scenario("corridor.json"), "--duration", "2", "--out", out.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(out / cli::kTrajectoryFile));
  CHECK(fs::exists(out / cli::kMetricsFile));
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(out)) ++files;
  CHECK(files == 2);

  const auto metrics = nlohmann::json::parse(read(out / cli::kMetricsFile));
  CHECK(metrics["config.duration"] == 2.0);
  CHECK(metrics["config.variant"] == "original");
  CHECK(metrics["population"] == 10);
  CHECK(metrics.contains("config.A_r"));
  for (auto it = metrics.begin(); it != metrics.end(); ++it) CHECK((!it->is_object()));

  // Re-running replaces the files with identical content.
  const std::string first = read(out / cli::kTrajectoryFile);
  CHECK(invoke({"run", "--scenario", scenario("corridor.json"), "--duration", "2", "--out", out.string()}).code == 0);
  CHECK(read(out / cli::kTrajectoryFile) == first);
}

TEST_CASE("flags override scenario defaults") {
  const fs::path out = scratch("override");
  const Invocation r = invoke({"run", "--scenario", scenario("corridor.json"), "--variant", "lkf", "--dt", "0.02",
                               "--duration", "1", "--seed", "77", "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto metrics = nlohmann::json::parse(read(out / cli::kMetricsFile));
  CHECK(metrics["config.variant"] == "lkf");
  CHECK(metrics["config.dt"] == 0.02);
  CHECK(metrics["config.seed"] == 77);
  CHECK(metrics["config.output_every"] == 10);  // from the scenario file
}

TEST_CASE("default output root comes from the environment") {
  const fs::path root = scratch("root");
  ::setenv(cli::kOutputRootEnv, root.c_str(), 1);
  const Invocation r = invoke({"run", "--scenario", scenario("corridor.json"), "--duration", "0.5"});
  ::unsetenv(cli::kOutputRootEnv);
  CHECK(r.code == 0);
  CHECK(fs::exists(root / "corridor" / "run" / cli::kMetricsFile));
}

TEST_CASE("validation failures exit with 1") {
  SUBCASE("missing scenario names the path") {
    const Invocation r = invoke({"run", "--scenario", "/no/such/file.json"});
    CHECK(r.code == 1);
    CHECK(r.err.find("/no/such/file.json") != std::string::npos);
  }
  SUBCASE("zero mass never reaches integration") {
    const fs::path p = write_scenario("zero_mass", R"({"version": 1, "name": "zm",
      "geometry": {"walls": [{"a": [0, 0], "b": [5, 0]}]},
      "exits": [{"id": "x", "a": [4, 0], "b": [5, 0]}],
      "population": [{"id": 0, "position": [1, 1], "mass": 0}]})");
    const fs::path out = scratch("zero_mass_out");
    const Invocation r = invoke({"run", "--scenario", p.string(), "--out", out.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("range_violation") != std::string::npos);
    CHECK_FALSE(fs::exists(out));
  }
  SUBCASE("bad flag values") {
    CHECK(invoke({"run", "--scenario", scenario("corridor.json"), "--dt", "-1"}).code == 1);
    CHECK(invoke({"run", "--scenario", scenario("corridor.json"), "--variant", "chaotic"}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
    CHECK(invoke({}).code == 1);
  }
  SUBCASE("validate subcommand") {
    const Invocation ok = invoke({"validate", "--scenario", scenario("room_exit.json")});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("100 pedestrians") != std::string::npos);
  }
}

TEST_CASE("numerical abort exits with 2") {
  const fs::path p = write_scenario("blowup", R"({"version": 1, "name": "blowup",
    "defaults": {"dt": 0.5, "duration": 400},
    "geometry": {"walls": [{"a": [500, 0], "b": [502, 0]}]},
    "exits": [{"id": "x", "a": [500, 0], "b": [501, 0]}],
    "routes": {"up": [[1, 10]]},
    "population": [{"id": 0, "position": [1, 3], "tau": 0.01, "v0": 5, "route": "up"}]})");
  const Invocation r = invoke({"run", "--scenario", p.string(), "--out", scratch("blowup_out").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("pedestrian") != std::string::npos);
}

TEST_CASE("sweep") {
  const fs::path p = write_scenario("two_groups", kTwoGroups);
  SUBCASE("one row per value") {
    const fs::path out = scratch("sweep");
    const Invocation r = invoke({"sweep", "--scenario", p.string(), "--sweep", "f=0,0.5,1", "--out", out.string(),
                                 "--workers", "2"});
    REQUIRE(r.code == 0);
    const std::string csv = read(out / cli::kSweepFile);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.find("f,0.5,familiarity") != std::string::npos);
  }
  SUBCASE("f = 0 reproduces a plain memory-model run") {
    const fs::path sw = scratch("sweep_f0"), base = scratch("sweep_lkf");
    REQUIRE(invoke({"sweep", "--scenario", p.string(), "--sweep", "f=0", "--out", sw.string()}).code == 0);
    REQUIRE(invoke({"sweep", "--scenario", p.string(), "--variant", "lkf", "--sweep", "D=0.2", "--out", base.string()})
                .code == 0);
    auto metrics_part = [](const std::string& csv) {
      const std::string row = csv.substr(csv.find('\n') + 1);
      std::size_t pos = 0;
      for (int k = 0; k < 4; ++k) pos = row.find(',', pos) + 1;  // skip param,value,variant,seed
      return row.substr(pos);
    };
    CHECK(metrics_part(read(sw / cli::kSweepFile)) == metrics_part(read(base / cli::kSweepFile)));
  }
  SUBCASE("unknown parameter lists valid names") {
    const Invocation r = invoke({"sweep", "--scenario", p.string(), "--sweep", "warp=1,2"});
    CHECK(r.code == 1);
    CHECK(r.err.find("p_init") != std::string::npos);
    CHECK(r.err.find("v0") != std::string::npos);
  }
  SUBCASE("empty value list") {
    CHECK(invoke({"sweep", "--scenario", p.string(), "--sweep", "f="}).code == 1);
    CHECK(invoke({"sweep", "--scenario", p.string(), "--sweep", "f"}).code == 1);
  }
  SUBCASE("swept value out of range") {
    CHECK(invoke({"sweep", "--scenario", p.string(), "--sweep", "f=1.5"}).code == 1);
  }
}

TEST_CASE("compare") {
  const fs::path p = write_scenario("two_groups_cmp", kTwoGroups);
  SUBCASE("same variant twice gives zero deltas") {
    const fs::path out = scratch("cmp_same");
    REQUIRE(invoke({"compare", "--scenario", p.string(), "--variant", "original,original", "--out", out.string()})
                .code == 0);
    const std::string csv = read(out / cli::kComparisonFile);
    std::istringstream rows(csv);
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
      if (line.find("original#2") == std::string::npos) continue;
      const std::string tail = line.substr(line.find(',', line.find("original#2")) + 1);
      const std::string abs_delta = tail.substr(tail.find(',') + 1, tail.rfind(',') - tail.find(',') - 1);
      CHECK((abs_delta == "0" || abs_delta == "NA"));
    }
  }
  SUBCASE("four variants give four columns") {
    const fs::path out = scratch("cmp_four");
    const Invocation r = invoke({"compare", "--scenario", p.string(), "--variant", "original", "--variant", "hmfv",
                                 "--variant", "lkf", "--variant", "familiarity", "--out", out.string(), "--workers", "4"});
    REQUIRE(r.code == 0);
    const std::string wide = read(out / cli::kComparisonWideFile);
    CHECK(wide.substr(0, wide.find('\n')) == "metric,original,hmfv,lkf,familiarity");
  }
  SUBCASE("familiarity with f = 0 traces the memory model exactly") {
    const fs::path out = scratch("cmp_f0");
    REQUIRE(invoke({"compare", "--scenario", p.string(), "--variant", "lkf,familiarity", "--out", out.string()}).code ==
            0);
    CHECK(read(out / cli::kComparisonFile).find("max_trajectory_delta,familiarity,0,0,0") != std::string::npos);
  }
  SUBCASE("needs two variants") {
    CHECK(invoke({"compare", "--scenario", p.string(), "--variant", "lkf"}).code == 1);
  }
}

TEST_CASE("blocked door: nervousness rises from 0 while the original model has none") {
  const fs::path out = scratch("cmp_blocked");
  REQUIRE(invoke({"compare", "--scenario", scenario("blocked_door.json"), "--variant", "original,hmfv", "--duration",
                  "10", "--out", out.string()})
              .code == 0);
  const std::string wide = read(out / cli::kComparisonWideFile);
  CHECK(wide.find("mean_nervousness,NA,") != std::string::npos);

  const Scenario s = load_scenario(scenario("blocked_door.json"));
  SimulationConfig cfg = effective_config(s);
  cfg.duration = 10.0;
  cfg.output_every = 1;
  const cli::RunResult r = cli::execute(s, cfg, "hmfv");
  const auto& p = r.summary.series_mean_nervousness;
  REQUIRE(p.size() > 100);
  CHECK(p.front() == 0.0);
  // Rising edge while the jam forms. Later frames may dip slightly when the
  // crowd rearranges along the wall.
  std::size_t k = 1;
  for (; k < p.size() && p[k - 1] < 0.8; ++k) CHECK(p[k] >= p[k - 1]);
  CHECK(k < p.size());
  CHECK(p.back() > 0.8);
}
