#include "rws/experiment.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rws/baselines.hpp"
#include "rws/curb.hpp"
#include "rws/engine.hpp"
#include "rws/meanfield.hpp"
#include "rws/stats.hpp"

#ifndef RWS_VERSION
#define RWS_VERSION "unversioned"
#endif

namespace rws {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<double> parse_vector(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

StatePoint parse_start(const std::string& spec, const Game& game) {
  if (spec.empty() || spec == "uniform") return uniform_state(game);
  if (spec == "nash") {
    const NashResult nash = solve_nash_small(game);
    if (nash.equilibria.empty()) {
      throw std::invalid_argument("start=nash: no equilibrium found");
    }
    return StatePoint{nash.equilibria.front().s1, nash.equilibria.front().s2};
  }
  if (spec.rfind("corner:", 0) == 0) {
    const std::string rest = spec.substr(7);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("start: expected corner:<s1>,<s2> (1-based)");
    }
    const int s1 = std::stoi(rest.substr(0, comma));
    const int s2 = std::stoi(rest.substr(comma + 1));
    return corner_state(game, s1 - 1, s2 - 1);
  }
  if (spec.rfind("mixed:", 0) == 0) {
    const std::string rest = spec.substr(6);
    const auto semi = rest.find(';');
    if (semi == std::string::npos) {
      throw std::invalid_argument("start: expected mixed:<p1 csv>;<p2 csv>");
    }
    const std::vector<double> a = parse_vector(rest.substr(0, semi));
    const std::vector<double> b = parse_vector(rest.substr(semi + 1));
    StatePoint x;
    x.p1 = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
    x.p2 = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
    if (x.p1.size() != game.m1() || x.p2.size() != game.m2()) {
      throw std::invalid_argument("start: mixed vectors do not match the game");
    }
    x.validate();
    return x;
  }
  throw std::invalid_argument("start: unrecognized specification '" + spec +
                              "'");
}

namespace {

json state_to_json(const StatePoint& x) {
  json j;
  j["p1"] = std::vector<double>(x.p1.data(), x.p1.data() + x.p1.size());
  j["p2"] = std::vector<double>(x.p2.data(), x.p2.data() + x.p2.size());
  return j;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["command"] = c.command;
  j["game"] = c.game;
  j["beta"] = c.beta;
  j["k"] = c.k;
  j["epsilon"] = c.epsilon;
  if (!c.beta_grid.empty()) j["beta_grid"] = c.beta_grid;
  if (!c.epsilon_grid.empty()) j["epsilon_grid"] = c.epsilon_grid;
  j["horizon"] = c.horizon;
  j["burn_in"] = c.burn_in;
  j["n"] = c.n;
  j["thin"] = c.thin;
  j["window"] = c.window;
  j["num_seeds"] = c.num_seeds;
  j["delta"] = c.delta;
  j["eta"] = c.eta;
  j["dt"] = c.dt;
  j["time_horizon"] = c.time_horizon;
  j["start"] = c.start;
  if (!c.start_b.empty()) j["start_b"] = c.start_b;
  j["processes"] = c.processes;
  j["young_m"] = c.young_m;
  j["method"] = c.method;
  if (!c.k_sweep.empty()) j["k_sweep"] = c.k_sweep;
  j["reference"] = c.reference;
  if (c.has_seed) j["seed"] = c.seed;
  j["version"] = RWS_VERSION;
  return j;
}

class OutputSet {
 public:
  explicit OutputSet(const ExperimentConfig& config) : config_(config) {
    if (!config.out_dir.empty()) fs::create_directories(config.out_dir);
  }

  std::string path_for(const std::string& filename) const {
    return (fs::path(config_.out_dir) / filename).string();
  }

  void write_text(const std::string& filename, const std::string& body,
                  json extra_meta = json::object()) {
    const std::string path = path_for(filename);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
    out.close();
    written_.push_back(path);

    json meta = config_to_json(config_);
    meta["output"] = filename;
    for (auto& [key, value] : extra_meta.items()) meta[key] = value;
    const std::string meta_path =
        path_for(fs::path(filename).stem().string() + ".meta.json");
    std::ofstream mout(meta_path, std::ios::binary);
    mout << meta.dump(2) << "\n";
    mout.close();
    written_.push_back(meta_path);
  }

  std::vector<std::string> written() const { return written_; }

 private:
  const ExperimentConfig& config_;
  std::vector<std::string> written_;
};

// Rows of a simulated path: states[t] is the state the players faced when
// choosing plays[t]. Strategy indices are written 1-based.
std::string trajectory_csv(const std::vector<PlayProfile>& plays,
                           const std::vector<StatePoint>& states,
                           const std::string& process_tag) {
  if (states.size() < plays.size()) {
    throw std::logic_error("trajectory_csv: missing states");
  }
  std::ostringstream os;
  const int m1 = static_cast<int>(states.front().p1.size());
  const int m2 = static_cast<int>(states.front().p2.size());
  os << "t,s1,s2";
  for (int i = 1; i <= m1; ++i) os << ",p1_" << i;
  for (int i = 1; i <= m2; ++i) os << ",p2_" << i;
  if (!process_tag.empty()) os << ",process";
  os << "\n";
  for (std::size_t t = 0; t < plays.size(); ++t) {
    os << t << "," << plays[t].s1 + 1 << "," << plays[t].s2 + 1;
    for (int i = 0; i < m1; ++i) os << "," << format_double(states[t].p1(i));
    for (int i = 0; i < m2; ++i) os << "," << format_double(states[t].p2(i));
    if (!process_tag.empty()) os << "," << process_tag;
    os << "\n";
  }
  return os.str();
}

void require_seed(const ExperimentConfig& config) {
  if (!config.has_seed) {
    throw std::invalid_argument("config: missing required field 'seed'");
  }
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RwsParams params_of(const ExperimentConfig& c) {
  RwsParams p;
  p.beta = c.beta;
  p.k = c.k;
  p.epsilon = c.epsilon;
  p.validate();
  return p;
}

FixedPointResult solve_fixed_point(const Game& game, const RwsParams& params,
                                   const std::string& method,
                                   const StatePoint& x0) {
  if (method == "2x2") return fixed_point_2x2(game, params);
  if (method == "general") return fixed_point_general(game, params, x0);
  if (method != "auto") {
    throw std::invalid_argument("fixed-point: unknown method '" + method + "'");
  }
  if (game.m1() == 2 && game.m2() == 2) {
    try {
      return fixed_point_2x2(game, params);
    } catch (const IntegerCutoffError&) {
      throw;  // a genuine failure of the requested computation
    } catch (const std::invalid_argument&) {
      // structural precondition not met; fall through to the general solver
    }
  }
  return fixed_point_general(game, params, x0);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

void cmd_simulate(const ExperimentConfig& config, const Game& game,
                  OutputSet& out) {
  require_seed(config);
  const RwsParams params = params_of(config);
  const StatePoint start = parse_start(config.start, game);
  const Trajectory traj =
      simulate_trajectory(start, game, params, config.horizon, config.seed);
  json meta;
  meta["initial"] = state_to_json(traj.initial);
  meta["stream"] = traj.stream;
  out.write_text("trajectory.csv", trajectory_csv(traj.plays, traj.states, ""),
                 meta);
}

void cmd_compare(const ExperimentConfig& config, const Game& game,
                 OutputSet& out) {
  require_seed(config);
  const RwsParams params = params_of(config);
  const StatePoint start = parse_start(config.start, game);
  std::uint64_t stream = 0;
  for (const std::string& process : split_csv(config.processes)) {
    std::vector<PlayProfile> plays;
    std::vector<StatePoint> states;
    plays.reserve(config.horizon);
    states.reserve(config.horizon);
    json meta;
    if (process == "rws") {
      const Trajectory traj = simulate_trajectory(start, game, params,
                                                  config.horizon, config.seed,
                                                  stream);
      plays = traj.plays;
      states.assign(traj.states.begin(), traj.states.end() - 1);
    } else if (process == "young") {
      // Memory warmed with i.i.d. profiles from the mixed equilibrium.
      const NashResult nash = solve_nash_small(game);
      if (nash.equilibria.empty()) {
        throw std::invalid_argument("compare: no equilibrium to seed memory");
      }
      RngStream rng(config.seed, stream);
      YoungProcess young = YoungProcess::from_profile(
          game, static_cast<int>(config.young_m), config.k, config.epsilon,
          nash.equilibria.front().s1, nash.equilibria.front().s2, rng);
      for (std::int64_t t = 0; t < config.horizon; ++t) {
        states.push_back(young.memory_frequencies());
        plays.push_back(young.step(game, rng));
      }
      meta["young_m"] = config.young_m;
    } else if (process == "fp_recency") {
      FpRecencyState fp{start, config.beta};
      for (std::int64_t t = 0; t < config.horizon; ++t) {
        states.push_back(fp.beliefs);
        plays.push_back(fp_recency_step(fp, game));
      }
    } else {
      throw std::invalid_argument("compare: unknown process '" + process +
                                  "' (expected rws, young, fp_recency)");
    }
    meta["process"] = process;
    meta["stream"] = stream;
    out.write_text("trajectory_" + process + ".csv",
                   trajectory_csv(plays, states, process), meta);
    ++stream;
  }
}

void cmd_curb(const ExperimentConfig& config, const Game& game,
              OutputSet& out) {
  const std::vector<Block> blocks = minimal_k_curb_blocks(game, config.k);
  out.write_text("curb.json", curb_report(game, config.k, blocks).dump(2) + "\n");
}

json fixed_point_to_json(const FixedPointResult& fp) {
  json j;
  j["x_star"] = state_to_json(fp.x_star);
  j["residual"] = fp.residual;
  j["method"] = fp.method;
  j["converged"] = fp.converged;
  if (fp.nash_reference) j["nash_reference"] = state_to_json(*fp.nash_reference);
  return j;
}

void cmd_fixed_point(const ExperimentConfig& config, const Game& game,
                     OutputSet& out) {
  const RwsParams params = params_of(config);
  const StatePoint x0 = parse_start(config.start, game);
  const FixedPointResult fp =
      solve_fixed_point(game, params, config.method, x0);
  json doc = fixed_point_to_json(fp);
  if (!config.k_sweep.empty()) {
    json sweep = json::array();
    for (int k : config.k_sweep) {
      RwsParams pk = params;
      pk.k = k;
      const FixedPointResult fpk = solve_fixed_point(game, pk, config.method, x0);
      json row = fixed_point_to_json(fpk);
      row["k"] = k;
      if (fpk.nash_reference) {
        const double dist =
            std::max((fpk.x_star.p1 - fpk.nash_reference->p1)
                         .lpNorm<Eigen::Infinity>(),
                     (fpk.x_star.p2 - fpk.nash_reference->p2)
                         .lpNorm<Eigen::Infinity>());
        row["distance_to_nash"] = dist;
      }
      sweep.push_back(std::move(row));
    }
    doc["k_sweep"] = std::move(sweep);
  }
  out.write_text("fixedpoint.json", doc.dump(2) + "\n");
}

void cmd_meanfield(const ExperimentConfig& config, const Game& game,
                   OutputSet& out) {
  const RwsParams params = params_of(config);
  const StatePoint x0 = parse_start(config.start, game);
  const FixedPointResult fp = solve_fixed_point(game, params, "auto", x0);
  const MeanPath path = integrate_meanfield(game, params, x0,
                                            config.time_horizon, config.dt);
  const LyapunovCheck lyap = lyapunov_check(path, fp.x_star);

  std::ostringstream os;
  os << "t";
  for (int i = 1; i <= game.m1(); ++i) os << ",p1_" << i;
  for (int i = 1; i <= game.m2(); ++i) os << ",p2_" << i;
  os << ",V\n";
  for (std::size_t idx = 0; idx < path.points.size(); ++idx) {
    os << format_double(path.times[idx]);
    for (int i = 0; i < game.m1(); ++i) {
      os << "," << format_double(path.points[idx].p1(i));
    }
    for (int i = 0; i < game.m2(); ++i) {
      os << "," << format_double(path.points[idx].p2(i));
    }
    os << "," << format_double(lyap.v[idx]) << "\n";
  }
  json meta;
  meta["fixed_point"] = fixed_point_to_json(fp);
  meta["max_renorm_drift"] = path.max_renorm_drift;
  meta["max_lyapunov_increment"] = lyap.max_increment;
  out.write_text("meanpath.csv", os.str(), meta);
}

void cmd_ergodicity(const ExperimentConfig& config, const Game& game,
                    OutputSet& out) {
  require_seed(config);
  const RwsParams params = params_of(config);
  const StatePoint a = parse_start(config.start, game);
  const StatePoint b = parse_start(
      config.start_b.empty() ? config.start : config.start_b, game);
  const ErgodicityReport report = ergodicity_decay(
      game, params, a, b, config.window, config.horizon, config.seed);
  std::ostringstream os;
  os << "window,distance\n";
  for (std::size_t w = 0; w < report.window_distance.size(); ++w) {
    os << w << "," << format_double(report.window_distance[w]) << "\n";
  }
  json meta;
  meta["slope_log10_per_window"] = report.slope;
  meta["r_squared"] = report.r_squared;
  out.write_text("ergodicity.csv", os.str(), meta);
}

void cmd_concentration(const ExperimentConfig& config, const Game& game,
                       OutputSet& out) {
  require_seed(config);
  const RwsParams base = params_of(config);
  const std::vector<double> betas =
      config.beta_grid.empty() ? std::vector<double>{config.beta}
                               : config.beta_grid;
  StatePoint x_ref;
  json ref_meta;
  if (config.reference == "nash") {
    x_ref = parse_start("nash", game);
    ref_meta["reference"] = "nash";
  } else if (config.reference == "meanfield") {
    const FixedPointResult fp =
        solve_fixed_point(game, base, "auto", uniform_state(game));
    if (!fp.converged) {
      throw std::runtime_error(
          "concentration: mean-field fixed point did not converge; supply "
          "--reference nash");
    }
    x_ref = fp.x_star;
    ref_meta["reference"] = "meanfield";
    ref_meta["fixed_point"] = fixed_point_to_json(fp);
  } else {
    throw std::invalid_argument("concentration: reference must be 'nash' or "
                                "'meanfield'");
  }
  ref_meta["x_ref"] = state_to_json(x_ref);
  ref_meta["jobs"] = betas.size();
  ref_meta["stream_derivation"] = "stream = beta grid index";

  const std::vector<ConcentrationRow> rows = concentration_curve(
      game, base, betas, config.eta, config.n, config.thin, config.seed, x_ref);
  std::ostringstream os;
  os << "beta,eta,prob,stderr,n\n";
  for (const ConcentrationRow& r : rows) {
    os << format_double(r.beta) << "," << format_double(r.eta) << ","
       << format_double(r.probability) << "," << format_double(r.std_error)
       << "," << r.n << "\n";
  }
  out.write_text("concentration.csv", os.str(), ref_meta);
}

void cmd_occupancy(const ExperimentConfig& config, const Game& game,
                   OutputSet& out) {
  require_seed(config);
  const RwsParams base = params_of(config);
  const std::vector<double> epsilons =
      config.epsilon_grid.empty() ? std::vector<double>{config.epsilon}
                                  : config.epsilon_grid;
  if (config.num_seeds < 1) {
    throw std::invalid_argument("occupancy: num_seeds must be >= 1");
  }
  const std::vector<Block> blocks = minimal_k_curb_blocks(game, config.k);
  const std::int64_t burn =
      config.burn_in >= 0 ? config.burn_in : default_burn_in(config.beta);

  // One job per (epsilon, replicate), fanned out across cores; the stream
  // index pins each job's randomness, so scheduling cannot change results.
  auto job = [&](double eps, std::uint64_t stream) {
    RwsParams params = base;
    params.epsilon = eps;
    params.validate();
    RngStream rng(config.seed, stream);
    StatePoint state = parse_start(config.start, game);
    for (std::int64_t t = 0; t < burn; ++t) {
      simulate_step_inplace(state, game, params, rng);
    }
    std::int64_t inside = 0;
    for (std::int64_t t = 0; t < config.horizon; ++t) {
      simulate_step_inplace(state, game, params, rng);
      for (const Block& b : blocks) {
        if (in_neighborhood(state, b, config.delta)) {
          ++inside;
          break;
        }
      }
    }
    return static_cast<double>(inside) / static_cast<double>(config.horizon);
  };
  std::vector<std::future<double>> futures;
  std::uint64_t stream = 0;
  for (double eps : epsilons) {
    for (int rep = 0; rep < config.num_seeds; ++rep, ++stream) {
      futures.push_back(std::async(std::launch::async, job, eps, stream));
    }
  }
  std::ostringstream os;
  os << "epsilon,fraction\n";
  std::size_t idx = 0;
  for (double eps : epsilons) {
    for (int rep = 0; rep < config.num_seeds; ++rep, ++idx) {
      os << format_double(eps) << "," << format_double(futures[idx].get())
         << "\n";
    }
  }
  json meta;
  meta["blocks"] = curb_report(game, config.k, blocks)["minimal_blocks"];
  meta["burn_in_used"] = burn;
  meta["rows"] = "one row per (epsilon, replicate); replicate r uses stream "
                 "index epsilon_index * num_seeds + r";
  out.write_text("occupancy.csv", os.str(), meta);
}

void cmd_variance_scan(const ExperimentConfig& config, const Game& game,
                       OutputSet& out) {
  require_seed(config);
  const RwsParams base = params_of(config);
  const std::vector<double> betas =
      config.beta_grid.empty() ? std::vector<double>{config.beta}
                               : config.beta_grid;
  const std::vector<VarianceRow> rows = variance_scaling(
      game, base, betas, config.n, config.thin, config.seed);
  std::ostringstream os;
  os << "beta,var,ratio\n";
  for (const VarianceRow& r : rows) {
    os << format_double(r.beta) << "," << format_double(r.second_moment) << ","
       << format_double(r.ratio) << "\n";
  }
  json meta;
  meta["stderr_jackknife"] = json::array();
  for (const VarianceRow& r : rows) meta["stderr_jackknife"].push_back(r.std_error);
  meta["jobs"] = betas.size();
  meta["stream_derivation"] = "stream = beta grid index";
  out.write_text("variance.csv", os.str(), meta);
}

}  // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& config) {
  const Game game = load_game(config.game);
  OutputSet out(config);

  // Chain-running commands: surface the ergodicity threshold as a warning.
  for (const char* chain_cmd : {"simulate", "compare", "ergodicity",
                                "concentration", "occupancy", "variance-scan"}) {
    if (config.command != chain_cmd) continue;
    std::vector<double> betas = config.beta_grid;
    if (betas.empty()) betas.push_back(config.beta);
    for (double beta : betas) {
      RwsParams probe{beta, config.k, config.epsilon};
      const std::string warning = ergodicity_warning(probe, game);
      if (!warning.empty()) std::cerr << "warning: " << warning << "\n";
    }
    break;
  }

  if (config.command == "simulate") {
    cmd_simulate(config, game, out);
  } else if (config.command == "compare") {
    cmd_compare(config, game, out);
  } else if (config.command == "curb") {
    cmd_curb(config, game, out);
  } else if (config.command == "fixed-point") {
    cmd_fixed_point(config, game, out);
  } else if (config.command == "meanfield") {
    cmd_meanfield(config, game, out);
  } else if (config.command == "ergodicity") {
    cmd_ergodicity(config, game, out);
  } else if (config.command == "concentration") {
    cmd_concentration(config, game, out);
  } else if (config.command == "occupancy") {
    cmd_occupancy(config, game, out);
  } else if (config.command == "variance-scan") {
    cmd_variance_scan(config, game, out);
  } else {
    throw std::invalid_argument("unknown command '" + config.command + "'");
  }
  return out.written();
}

}  // namespace rws
