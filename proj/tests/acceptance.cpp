// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion re-derives its expectations from first principles
// (exact enumerations, pinned constants, independent statistics) and runs at
// fixed seeds so that results are reproducible.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rws/baselines.hpp"
#include "rws/curb.hpp"
#include "rws/engine.hpp"
#include "rws/experiment.hpp"
#include "rws/game.hpp"
#include "rws/meanfield.hpp"
#include "rws/stats.hpp"

using namespace rws;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::chrono::steady_clock::time_point g_mark;

void report(int id, const std::string& name, bool ok,
            const std::string& detail) {
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - g_mark)
          .count();
  std::printf("[%s] criterion %2d (%5.1f s): %s%s%s\n", ok ? "PASS" : "FAIL",
              id, seconds, name.c_str(), detail.empty() ? "" : " -- ",
              detail.c_str());
  std::fflush(stdout);
  g_mark = std::chrono::steady_clock::now();
  if (!ok) ++g_failures;
}

double sup_distance(const StatePoint& a, const StatePoint& b) {
  return std::max((a.p1 - b.p1).lpNorm<Eigen::Infinity>(),
                  (a.p2 - b.p2).lpNorm<Eigen::Infinity>());
}

// --------------------------------------------------------------------------
// 1. Exact vs Monte Carlo play distribution (chi-square at 0.001)
// --------------------------------------------------------------------------
void criterion_1() {
  const RwsParams params{0.9, 20, 0.05};
  const std::int64_t plays_per_state = 1000000;
  RngStream state_rng(101);
  double min_pvalue = 1.0;
  bool ok = true;
  for (const char* name : {"matching-pennies", "unstable-rps"}) {
    const Game game = load_game(name);
    for (int rep = 0; rep < 10; ++rep) {
      StatePoint x;
      x.p1 = random_simplex_point(game.m1(), state_rng);
      x.p2 = random_simplex_point(game.m2(), state_rng);
      const Eigen::VectorXd d1 =
          exact_play_distribution(game, 0, x.p2, params);
      const Eigen::VectorXd d2 =
          exact_play_distribution(game, 1, x.p1, params);

      std::vector<std::int64_t> observed(game.m1() * game.m2(), 0);
      RngStream rng(202, rep + (name[0] == 'm' ? 0 : 100));
      for (std::int64_t i = 0; i < plays_per_state; ++i) {
        const int s1 = sample_play(game, 0, x.p2, params, rng);
        const int s2 = sample_play(game, 1, x.p1, params, rng);
        ++observed[s1 * game.m2() + s2];
      }
      double stat = 0.0;
      for (int s1 = 0; s1 < game.m1(); ++s1) {
        for (int s2 = 0; s2 < game.m2(); ++s2) {
          const double expected = plays_per_state * d1(s1) * d2(s2);
          const double diff = observed[s1 * game.m2() + s2] - expected;
          stat += diff * diff / expected;
        }
      }
      const double pvalue =
          chi_square_pvalue(stat, game.m1() * game.m2() - 1);
      min_pvalue = std::min(min_pvalue, pvalue);
      ok = ok && pvalue > 0.001;
    }
  }
  std::ostringstream os;
  os << "20 states x 1e6 plays, min p-value " << min_pvalue;
  report(1, "exact vs Monte Carlo play distribution", ok, os.str());
}

// --------------------------------------------------------------------------
// 2. Lipschitz bound (1-eps) * k * m_opp on the play probabilities
// --------------------------------------------------------------------------
void criterion_2() {
  RngStream rng(303);
  const Game mp = matching_pennies();
  const Game rps = unstable_rps();
  bool ok = true;
  std::ostringstream os;
  for (const auto& [game_ptr, k] :
       std::vector<std::pair<const Game*, int>>{
           {&mp, 1}, {&mp, 5}, {&rps, 5}, {&rps, 20}}) {
    const Game& game = *game_ptr;
    const int m_opp = game.m2();
    const RwsParams params{0.9, k, 0.05};
    const double bound = (1.0 - params.epsilon) * k * m_opp;
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Eigen::VectorXd p = random_simplex_point(m_opp, rng);
      // Half the pairs are independent points, half small perturbations,
      // which probe the local difference quotient where it is sharpest.
      Eigen::VectorXd q;
      if (trial % 2 == 0) {
        q = random_simplex_point(m_opp, rng);
      } else {
        q = p + 1e-4 * (random_simplex_point(m_opp, rng) -
                        Eigen::VectorXd::Constant(m_opp, 1.0 / m_opp));
        q = q.cwiseMax(0.0);
        q /= q.sum();
      }
      const double dist = (p - q).lpNorm<Eigen::Infinity>();
      if (dist == 0.0) continue;
      const double num =
          (exact_play_distribution(game, 0, p, params) -
           exact_play_distribution(game, 0, q, params))
              .lpNorm<Eigen::Infinity>();
      worst_ratio = std::max(worst_ratio, num / dist);
      if (num / dist > bound + 1e-9) ok = false;
    }
    os << "(k=" << k << ",m=" << m_opp << ") max ratio " << worst_ratio << "/"
       << bound << "; ";
  }
  report(2, "Lipschitz bound (1-eps)*k*m on play probabilities", ok, os.str());
}

// --------------------------------------------------------------------------
// 3. History approximation bracket and length
// --------------------------------------------------------------------------
void criterion_3() {
  RngStream rng(404);
  bool ok = true;
  int checked = 0, rejected = 0;
  for (const int m : {2, 3, 4}) {
    for (const double beta : {0.6, 0.9}) {
      if ((1.0 - beta) * m > 1.0) {
        // Outside the construction's hypothesis: the documented
        // precondition error must fire.
        try {
          approximate_history(
              Eigen::VectorXd::Constant(m, 1.0 / m), beta, 0.1);
          ok = false;
        } catch (const std::invalid_argument&) {
          ++rejected;
        }
        continue;
      }
      for (const double delta : {0.1, 0.01}) {
        int expected_len = 0;
        for (double pw = 1.0; pw >= delta; pw *= beta) ++expected_len;
        for (int trial = 0; trial < 1000; ++trial) {
          const Eigen::VectorXd target = random_simplex_point(m, rng);
          const ApproxHistory h = approximate_history(target, beta, delta);
          if (static_cast<int>(h.plays.size()) != expected_len) ok = false;
          for (int j = 0; j < m; ++j) {
            if (!(h.partial_sums(j) <= target(j) + 1e-12)) ok = false;
            if (!(h.partial_sums(j) >
                  std::max(target(j) - delta, 0.0) - 1e-12)) {
              ok = false;
            }
          }
          ++checked;
        }
      }
    }
  }
  std::ostringstream os;
  os << checked << " bracketed histories, " << rejected
     << " hypothesis violations rejected";
  report(3, "history approximation bracket property", ok, os.str());
}

// --------------------------------------------------------------------------
// 4. Ergodicity decay of coupled chains
// --------------------------------------------------------------------------
void criterion_4() {
  const Game mp = matching_pennies();
  const RwsParams params{0.99, 20, 0.05};
  const StatePoint a = corner_state(mp, 0, 0);
  const StatePoint b = corner_state(mp, 1, 1);
  // The coupled distance decays from ~1 to the coupling noise floor
  // (~0.025) over roughly 400 steps; 20 windows of 20 steps span exactly
  // that regime, giving the cleanest geometric read-out.
  const std::int64_t window = 20;
  const std::int64_t horizon = 400;  // 20 windows

  const ErgodicityReport decay =
      ergodicity_decay(mp, params, a, b, window, horizon, 505);
  bool ok = decay.slope < 0.0 && decay.r_squared >= 0.7;

  const ErgodicityReport coupled =
      ergodicity_decay(mp, params, a, a, window, horizon, 505);
  double worst = 0.0;
  for (double d : coupled.window_distance) worst = std::max(worst, d);
  ok = ok && worst < 1e-12;

  std::ostringstream os;
  os << "slope " << decay.slope << " /window, R^2 " << decay.r_squared
     << ", coupled max distance " << worst;
  report(4, "geometric decay of the coupled-chain distance", ok, os.str());
}

// --------------------------------------------------------------------------
// 5. Minimal blocks of the bundled games (exact arithmetic)
// --------------------------------------------------------------------------
void criterion_5() {
  bool ok = true;
  {
    const auto blocks = minimal_k_curb_blocks(coordination_game(), 5);
    ok = ok && blocks.size() == 2 && blocks[0] == Block{{0}, {0}} &&
         blocks[1] == Block{{1}, {1}};
  }
  {
    const auto blocks = minimal_k_curb_blocks(matching_pennies(), 5);
    ok = ok && blocks.size() == 1 &&
         blocks[0] == full_block(matching_pennies());
  }
  {
    const Game ex = three_by_two_example();
    const auto k1 = minimal_k_curb_blocks(ex, 1);
    const auto k2 = minimal_k_curb_blocks(ex, 2);
    ok = ok && k1.size() == 1 && k1[0] == Block{{0, 1}, {0, 1}};
    ok = ok && k2.size() == 1 && k2[0] == full_block(ex);
  }
  report(5, "minimal blocks: coordination, matching pennies, 3x2 example", ok,
         "exact integer arithmetic, zero tolerance");
}

// --------------------------------------------------------------------------
// 6. Occupancy of block neighborhoods as the error rate shrinks
// --------------------------------------------------------------------------
void criterion_6() {
  const Game game = coordination_game();
  const int k = 5;
  const double delta = 0.1;
  const std::vector<double> epsilons{0.2, 0.1, 0.05, 0.02};
  const std::int64_t horizon = 100000;
  const int num_seeds = 5;
  const auto blocks = minimal_k_curb_blocks(game, k);

  std::vector<double> means;
  std::uint64_t stream = 0;
  for (double eps : epsilons) {
    const RwsParams params{0.98, k, eps};
    const std::int64_t burn = default_burn_in(params.beta);
    double total = 0.0;
    for (int rep = 0; rep < num_seeds; ++rep, ++stream) {
      RngStream rng(606, stream);
      StatePoint state = uniform_state(game);
      for (std::int64_t t = 0; t < burn; ++t) {
        simulate_step_inplace(state, game, params, rng);
      }
      std::int64_t inside = 0;
      for (std::int64_t t = 0; t < horizon; ++t) {
        simulate_step_inplace(state, game, params, rng);
        for (const Block& b : blocks) {
          if (in_neighborhood(state, b, delta)) {
            ++inside;
            break;
          }
        }
      }
      total += static_cast<double>(inside) / static_cast<double>(horizon);
    }
    means.push_back(total / num_seeds);
  }
  bool ok = true;
  for (std::size_t i = 0; i + 1 < means.size(); ++i) {
    if (!(means[i] <= means[i + 1] + 1e-12)) ok = false;
  }
  ok = ok && means.back() >= 0.9;
  std::ostringstream os;
  os << "mean occupancy over eps {0.2,0.1,0.05,0.02}: ";
  for (double m : means) os << m << " ";
  report(6, "occupancy of minimal-block neighborhoods grows as eps shrinks",
         ok, os.str());
}

// --------------------------------------------------------------------------
// 7. 2x2 fixed point: exact center, integer cut-off error, k-limit
// --------------------------------------------------------------------------
void criterion_7() {
  const Game mp = matching_pennies();
  bool ok = true;
  std::ostringstream os;

  std::vector<double> gaps;
  for (int k : {5, 11, 21, 41}) {
    const RwsParams params{0.999, k, 0.05};
    const FixedPointResult fp = fixed_point_2x2(mp, params);
    const bool exact_center = fp.x_star.p1(0) == 0.5 && fp.x_star.p1(1) == 0.5 &&
                              fp.x_star.p2(0) == 0.5 && fp.x_star.p2(1) == 0.5;
    if (!exact_center) ok = false;
    if (!(fp.residual < 1e-12)) ok = false;
    gaps.push_back(sup_distance(fp.x_star, *fp.nash_reference));
  }
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
    if (gaps[i + 1] > gaps[i] + 1e-15) ok = false;
  }

  bool cutoff_error = false;
  try {
    fixed_point_2x2(mp, RwsParams{0.999, 20, 0.05});
  } catch (const IntegerCutoffError&) {
    cutoff_error = true;
  }
  ok = ok && cutoff_error;

  os << "odd k in {5,11,21,41} all exactly (1/2,1/2)x(1/2,1/2); k=20 raises "
        "the integer cut-off error";
  report(7, "2x2 fixed point and k-limit", ok, os.str());
}

// --------------------------------------------------------------------------
// 8. Mean-field global stability for matching pennies
// --------------------------------------------------------------------------
void criterion_8() {
  const Game mp = matching_pennies();
  const RwsParams params{0.999, 21, 0.05};
  const FixedPointResult fp = fixed_point_2x2(mp, params);
  RngStream rng(707);
  bool ok = true;
  double worst_terminal = 0.0, worst_increment = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    StatePoint x0;
    x0.p1 = random_simplex_point(2, rng);
    x0.p2 = random_simplex_point(2, rng);
    const MeanPath path = integrate_meanfield(mp, params, x0, 60.0, 0.01);
    const double terminal = sup_distance(path.points.back(), fp.x_star);
    const LyapunovCheck lyap = lyapunov_check(path, fp.x_star);
    worst_terminal = std::max(worst_terminal, terminal);
    worst_increment = std::max(worst_increment, lyap.max_increment);
    if (terminal >= 1e-3 || lyap.max_increment > 1e-8) ok = false;
  }
  std::ostringstream os;
  os << "20 starts: worst terminal distance " << worst_terminal
     << ", worst V increment " << worst_increment;
  report(8, "mean-field paths all reach x* with V nonincreasing", ok, os.str());
}

// --------------------------------------------------------------------------
// 9. Concentration of the invariant measure as beta -> 1
// --------------------------------------------------------------------------
void criterion_9() {
  const Game rps = unstable_rps();
  const RwsParams base{0.9, 20, 0.05};
  const std::vector<double> betas{0.9, 0.99, 0.999, 0.9999};
  const double eta = 0.01;
  const std::int64_t n = 10000;

  const FixedPointResult fp =
      fixed_point_general(rps, base, uniform_state(rps));
  const StatePoint x_ref = fp.converged
                               ? fp.x_star
                               : parse_start("nash", rps);

  const std::vector<ConcentrationRow> rows =
      concentration_curve(rps, base, betas, eta, n, 0, 808, x_ref);

  bool ok = true;
  std::vector<double> xs, ys;
  std::ostringstream os;
  os << "P(dist >= 0.01): ";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << rows[i].probability << " ";
    if (i + 1 < rows.size()) {
      // weakly decreasing within two binomial standard errors
      const double slack =
          2.0 * (rows[i].std_error + rows[i + 1].std_error);
      if (rows[i + 1].probability > rows[i].probability + slack) ok = false;
    }
    xs.push_back(1.0 / (1.0 - rows[i].beta));
    ys.push_back(std::log(std::max(rows[i].probability, 1e-12)));
  }
  const LineFit fit = fit_line(xs, ys);
  if (!(fit.slope < 0.0)) ok = false;
  os << "; log-prob vs 1/(1-beta) slope " << fit.slope;
  report(9, "invariant-measure concentration tightens with beta", ok, os.str());
}

// --------------------------------------------------------------------------
// 10. Stationary variance scaling proportional to (1 - beta)
// --------------------------------------------------------------------------
void criterion_10() {
  const Game mp = matching_pennies();
  const RwsParams base{0.9, 21, 0.05};
  const std::vector<double> betas{0.9, 0.99, 0.999};
  const std::vector<VarianceRow> rows =
      variance_scaling(mp, base, betas, 20000, 0, 909);
  bool ok = true;
  double rmin = rows[0].ratio, rmax = rows[0].ratio;
  std::ostringstream os;
  os << "E||p-x*||^2: ";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << rows[i].second_moment << " ";
    if (i + 1 < rows.size() &&
        !(rows[i + 1].second_moment < rows[i].second_moment)) {
      ok = false;
    }
    rmin = std::min(rmin, rows[i].ratio);
    rmax = std::max(rmax, rows[i].ratio);
  }
  if (!(rmax / rmin <= 3.0)) ok = false;
  os << "; ratio/(1-beta) spread " << rmax / rmin;
  report(10, "second moment around x* scales like (1-beta)", ok, os.str());
}

// --------------------------------------------------------------------------
// 11. Figure-level qualitative reproduction
// --------------------------------------------------------------------------
void criterion_11() {
  bool ok = true;
  std::ostringstream os;

  // (a) matching pennies: sampler beats the finite-memory process on mean
  //     sup-distance to the mixed equilibrium, per seed.
  {
    const Game mp = matching_pennies();
    const RwsParams params{0.999, 20, 0.05};
    const Eigen::VectorXd half = Eigen::VectorXd::Constant(2, 0.5);
    const std::int64_t horizon = 10000;
    os << "(a) rws vs young mean distance: ";
    for (int seed = 0; seed < 5; ++seed) {
      RngStream rws_rng(1000 + seed, 0);
      StatePoint state = corner_state(mp, 0, 0);
      double rws_avg = 0.0;
      for (std::int64_t t = 0; t < horizon; ++t) {
        simulate_step_inplace(state, mp, params, rws_rng);
        rws_avg += std::max((state.p1 - half).lpNorm<Eigen::Infinity>(),
                            (state.p2 - half).lpNorm<Eigen::Infinity>());
      }
      rws_avg /= horizon;

      RngStream young_rng(1000 + seed, 1);
      YoungProcess young = YoungProcess::from_profile(
          mp, 1000, 20, 0.05, half, half, young_rng);
      double young_avg = 0.0;
      for (std::int64_t t = 0; t < horizon; ++t) {
        young.step(mp, young_rng);
        const StatePoint freq = young.memory_frequencies();
        young_avg += std::max((freq.p1 - half).lpNorm<Eigen::Infinity>(),
                              (freq.p2 - half).lpNorm<Eigen::Infinity>());
      }
      young_avg /= horizon;
      if (!(rws_avg < young_avg)) ok = false;
      os << rws_avg << "<" << young_avg << " ";
    }
  }

  // (b) unstable RPS: the sampler hugs the equilibrium, recency-weighted
  //     fictitious play orbits it.
  {
    const Game rps = unstable_rps();
    const NashResult nash = solve_nash_small(rps);
    const StatePoint hatx{nash.equilibria.front().s1,
                          nash.equilibria.front().s2};
    const RwsParams params{0.9999, 20, 0.0};
    const std::int64_t burn = 100000;
    const std::int64_t horizon = 1000000;

    RngStream rng(1100);
    StatePoint state = hatx;
    for (std::int64_t t = 0; t < burn; ++t) {
      simulate_step_inplace(state, rps, params, rng);
    }
    std::int64_t rws_inside = 0;
    for (std::int64_t t = 0; t < horizon; ++t) {
      simulate_step_inplace(state, rps, params, rng);
      if (sup_distance(state, hatx) < 0.2) ++rws_inside;
    }
    const double rws_frac =
        static_cast<double>(rws_inside) / static_cast<double>(horizon);

    FpRecencyState fp{hatx, params.beta};
    for (std::int64_t t = 0; t < burn; ++t) fp_recency_step(fp, rps);
    std::int64_t fp_inside = 0;
    for (std::int64_t t = 0; t < horizon; ++t) {
      fp_recency_step(fp, rps);
      if (sup_distance(fp.beliefs, hatx) < 0.2) ++fp_inside;
    }
    const double fp_frac =
        static_cast<double>(fp_inside) / static_cast<double>(horizon);

    if (!(rws_frac >= 0.95 && fp_frac < rws_frac)) ok = false;
    os << "; (b) fraction within 0.2 of equilibrium: rws " << rws_frac
       << ", fp " << fp_frac;
  }
  report(11, "figure-level comparisons (finite memory, fictitious play)", ok,
         os.str());
}

// --------------------------------------------------------------------------
// 12. Byte-level reproducibility of experiment outputs
// --------------------------------------------------------------------------
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion_12() {
  const fs::path root = fs::temp_directory_path() / "rws_acceptance_determinism";
  fs::remove_all(root);
  bool ok = true;
  std::ostringstream os;

  std::vector<ExperimentConfig> configs;
  {
    ExperimentConfig sim;
    sim.command = "simulate";
    sim.game = "matching-pennies";
    sim.beta = 0.999;
    sim.k = 20;
    sim.epsilon = 0.05;
    sim.horizon = 2000;
    sim.start = "corner:1,1";
    sim.seed = 7;
    sim.has_seed = true;
    configs.push_back(sim);

    ExperimentConfig conc;
    conc.command = "concentration";
    conc.game = "unstable-rps";
    conc.k = 20;
    conc.epsilon = 0.05;
    conc.beta_grid = {0.9, 0.99};
    conc.eta = 0.01;
    conc.n = 500;
    conc.thin = 5;
    conc.reference = "nash";
    conc.seed = 11;
    conc.has_seed = true;
    configs.push_back(conc);

    ExperimentConfig occ;
    occ.command = "occupancy";
    occ.game = "coordination";
    occ.beta = 0.98;
    occ.k = 5;
    occ.epsilon_grid = {0.1, 0.02};
    occ.delta = 0.1;
    occ.horizon = 2000;
    occ.num_seeds = 2;
    occ.seed = 13;
    occ.has_seed = true;
    configs.push_back(occ);

    ExperimentConfig cmp;
    cmp.command = "compare";
    cmp.game = "matching-pennies";
    cmp.processes = "rws,young,fp_recency";
    cmp.young_m = 200;
    cmp.beta = 0.999;
    cmp.k = 20;
    cmp.epsilon = 0.05;
    cmp.horizon = 500;
    cmp.start = "corner:1,1";
    cmp.seed = 17;
    cmp.has_seed = true;
    configs.push_back(cmp);
  }

  int compared = 0;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    ExperimentConfig run_a = configs[c];
    ExperimentConfig run_b = configs[c];
    run_a.out_dir = (root / ("a" + std::to_string(c))).string();
    run_b.out_dir = (root / ("b" + std::to_string(c))).string();
    const std::vector<std::string> files_a = run_experiment(run_a);
    const std::vector<std::string> files_b = run_experiment(run_b);
    if (files_a.size() != files_b.size()) {
      ok = false;
      continue;
    }
    for (std::size_t i = 0; i < files_a.size(); ++i) {
      if (slurp(files_a[i]) != slurp(files_b[i])) {
        ok = false;
        os << "mismatch: " << files_a[i] << " ";
      }
      ++compared;
    }
  }
  fs::remove_all(root);
  os << compared << " files byte-compared across reruns";
  report(12, "identical config and seed give identical output bytes", ok,
         os.str());
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  g_mark = t0;

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();

  const double seconds =
      std::chrono::duration<double>(clock::now() - t0).count();
  std::printf("%s -- %d criteria failed, %.1f s total\n",
              g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures, seconds);
  return g_failures == 0 ? 0 : 1;
}
