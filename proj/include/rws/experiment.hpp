#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rws/game.hpp"

namespace rws {

//! One reproducible experiment: a command, a game, parameters and a seed.
//! Identical configs (including the seed) produce byte-identical outputs.
struct ExperimentConfig {
  std::string command;  // simulate | curb | fixed-point | meanfield |
                        // ergodicity | concentration | occupancy |
                        // variance-scan | compare
  std::string game;     // built-in name or path to a JSON game file

  double beta = 0.999;
  int k = 20;
  double epsilon = 0.05;
  std::vector<double> beta_grid;     // concentration, variance-scan
  std::vector<double> epsilon_grid;  // occupancy

  std::int64_t horizon = 10000;
  std::int64_t burn_in = -1;  // -1: ceil(10 / (1 - beta))
  std::int64_t n = 10000;
  std::int64_t thin = 0;  // 0: automatic per-beta stride
  std::int64_t window = 2000;
  int num_seeds = 1;  // occupancy replicates

  double delta = 0.1;
  double eta = 0.01;
  double dt = 0.01;
  double time_horizon = 100.0;  // meanfield integration length

  std::string start = "uniform";  // uniform | nash | corner:i,j | mixed:p1;p2
  std::string start_b;            // ergodicity: second chain start
  std::string processes = "rws,young";  // compare
  std::int64_t young_m = 1000;
  std::string method = "auto";          // fixed-point: auto | 2x2 | general
  std::vector<int> k_sweep;             // fixed-point: optional k table
  std::string reference = "meanfield";  // concentration: meanfield | nash

  std::uint64_t seed = 0;
  bool has_seed = false;

  std::string out_dir = ".";
};

// Parses a start specification against a game; throws on malformed input.
StatePoint parse_start(const std::string& spec, const Game& game);

//! Executes the configured command and writes its CSV/JSON outputs plus a
//! .meta.json sidecar per output file. Returns the paths written. Throws
//! std::invalid_argument / std::runtime_error with a diagnostic on any
//! validation or module error.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

// Shortest round-trip decimal formatting used for every numeric output.
std::string format_double(double v);

}  // namespace rws
