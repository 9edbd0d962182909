#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rws/experiment.hpp"
#include "rws/game.hpp"

using namespace rws;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rws_unit" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("start specifications") {
  const Game mp = matching_pennies();
  CHECK(parse_start("uniform", mp).p1(0) == 0.5);
  CHECK(parse_start("corner:2,1", mp).p1(1) == 1.0);
  CHECK(parse_start("nash", mp).p2(0) == doctest::Approx(0.5));
  const StatePoint mixed = parse_start("mixed:0.25,0.75;0.5,0.5", mp);
  CHECK(mixed.p1(0) == 0.25);
  CHECK_THROWS_AS(parse_start("corner:3,1", mp), std::invalid_argument);
  CHECK_THROWS_AS(parse_start("mixed:0.5,0.6;0.5,0.5", mp),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_start("bogus", mp), std::invalid_argument);
}

TEST_CASE("simulate writes a trajectory csv with a sidecar") {
  ExperimentConfig cfg;
  cfg.command = "simulate";
  cfg.game = "matching-pennies";
  cfg.horizon = 50;
  cfg.start = "corner:1,1";
  cfg.seed = 7;
  cfg.has_seed = true;
  cfg.out_dir = fresh_dir("simulate").string();

  const auto files = run_experiment(cfg);
  REQUIRE(files.size() == 2);
  const std::string csv = slurp(files[0]);
  CHECK(csv.rfind("t,s1,s2,p1_1,p1_2,p2_1,p2_2\n", 0) == 0);
  // Row 0 carries the pre-play state, here the (1,1) corner.
  const std::size_t row0 = csv.find('\n') + 1;
  const std::string first_row = csv.substr(row0, csv.find('\n', row0) - row0);
  CHECK(first_row.substr(0, 2) == "0,");
  CHECK(first_row.substr(first_row.size() - 8) == ",1,0,1,0");
  const nlohmann::json meta = nlohmann::json::parse(slurp(files[1]));
  CHECK(meta["command"] == "simulate");
  CHECK(meta["seed"] == 7);
  CHECK(meta.contains("version"));

  // Re-running the identical config reproduces the bytes.
  const auto again = run_experiment(cfg);
  CHECK(slurp(again[0]) == csv);
}

TEST_CASE("missing seed is rejected with the field name") {
  ExperimentConfig cfg;
  cfg.command = "simulate";
  cfg.game = "matching-pennies";
  cfg.horizon = 10;
  cfg.out_dir = fresh_dir("noseed").string();
  CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("seed"),
                       std::invalid_argument);
}

TEST_CASE("unknown games and commands are surfaced") {
  ExperimentConfig cfg;
  cfg.command = "simulate";
  cfg.game = "not-a-game";
  cfg.seed = 1;
  cfg.has_seed = true;
  cfg.out_dir = fresh_dir("badgame").string();
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

  cfg.game = "matching-pennies";
  cfg.command = "frobnicate";
  CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("frobnicate"),
                       std::invalid_argument);
}

TEST_CASE("curb command reports the minimal blocks") {
  ExperimentConfig cfg;
  cfg.command = "curb";
  cfg.game = "coordination";
  cfg.k = 5;
  cfg.out_dir = fresh_dir("curb").string();
  const auto files = run_experiment(cfg);
  const nlohmann::json doc = nlohmann::json::parse(slurp(files[0]));
  REQUIRE(doc["minimal_blocks"].size() == 2);
  CHECK(doc["minimal_blocks"][0]["c1"] == nlohmann::json::array({1}));
  CHECK(doc["minimal_blocks"][1]["c2"] == nlohmann::json::array({2}));
}

TEST_CASE("compare emits one tagged csv per process") {
  ExperimentConfig cfg;
  cfg.command = "compare";
  cfg.game = "matching-pennies";
  cfg.processes = "rws,young,fp_recency";
  cfg.young_m = 50;
  cfg.k = 5;
  cfg.horizon = 20;
  cfg.seed = 3;
  cfg.has_seed = true;
  cfg.out_dir = fresh_dir("compare").string();
  const auto files = run_experiment(cfg);
  REQUIRE(files.size() == 6);  // three csvs, three sidecars
  for (const char* process : {"rws", "young", "fp_recency"}) {
    bool found = false;
    for (const auto& f : files) {
      if (f.find(std::string("trajectory_") + process + ".csv") !=
          std::string::npos) {
        found = true;
        const std::string csv = slurp(f);
        CHECK(csv.find(",process") != std::string::npos);
        CHECK(csv.find(std::string(",") + process + "\n") != std::string::npos);
      }
    }
    CHECK(found);
  }
}

TEST_CASE("fixed-point command writes the sweep table") {
  ExperimentConfig cfg;
  cfg.command = "fixed-point";
  cfg.game = "matching-pennies";
  cfg.k = 21;
  cfg.epsilon = 0.05;
  cfg.k_sweep = {5, 11};
  cfg.out_dir = fresh_dir("fixedpoint").string();
  const auto files = run_experiment(cfg);
  const nlohmann::json doc = nlohmann::json::parse(slurp(files[0]));
  CHECK(doc["converged"] == true);
  CHECK(doc["method"] == "rho-bisection");
  CHECK(doc["x_star"]["p1"][0] == 0.5);
  REQUIRE(doc["k_sweep"].size() == 2);
  CHECK(doc["k_sweep"][0]["k"] == 5);
  CHECK(doc["k_sweep"][0]["distance_to_nash"] == 0.0);
}
