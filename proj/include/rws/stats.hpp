#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rws/curb.hpp"
#include "rws/engine.hpp"
#include "rws/game.hpp"

namespace rws {

//! Post burn-in sample cloud of the state chain, approximating the invariant
//! measure; uniform weights, every `thin`-th state kept.
struct EmpiricalMeasure {
  std::vector<StatePoint> samples;
  RwsParams params;
  std::string game_name;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::int64_t burn_in = 0;
  std::int64_t thin = 1;
};

// Default burn-in: ten state relaxation times, ceil(10 / (1-beta)).
std::int64_t default_burn_in(double beta);

// Runs burn_in steps from `start` (uniform state when omitted), then keeps
// every thin-th state until n samples are collected. Bit-reproducible per
// (seed, stream).
EmpiricalMeasure estimate_invariant(const Game& game, const RwsParams& params,
                                    std::int64_t burn_in, std::int64_t n,
                                    std::int64_t thin, std::uint64_t seed,
                                    const StatePoint* start = nullptr,
                                    std::uint64_t stream = 0);

// Exact order-1 Wasserstein distance between two equal-size scalar samples:
// mean absolute difference after sorting. A metric on such multisets.
double w1_marginal(std::vector<double> a, std::vector<double> b);

//! Coupling diagnostic for geometric ergodicity: two chains driven by the
//! SAME random stream from two starts; per window of `window` steps, the
//! max-over-coordinates w1_marginal between the chains' windowed samples,
//! plus a least-squares fit of log10 distance against the window index.
//! Identical starts give identical chains and zero distances.
struct ErgodicityReport {
  std::vector<double> window_distance;
  std::int64_t window = 0;
  double slope = 0.0;      // log10 distance per window
  double r_squared = 0.0;
};

ErgodicityReport ergodicity_decay(const Game& game, const RwsParams& params,
                                  const StatePoint& start_a,
                                  const StatePoint& start_b,
                                  std::int64_t window, std::int64_t horizon,
                                  std::uint64_t seed);

// Fraction of states lying in the union of the blocks' delta-neighborhoods.
double occupancy_fraction(const std::vector<StatePoint>& states,
                          const std::vector<Block>& blocks, double delta);
double occupancy_fraction(const Trajectory& traj,
                          const std::vector<Block>& blocks, double delta);

//! Stationary exceedance estimates P(||x - x_ref||_inf >= eta) per beta,
//! with binomial standard errors.
struct ConcentrationRow {
  double beta = 0.0;
  double eta = 0.0;
  double probability = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
};

// thin <= 0 selects an automatic per-beta stride of about a tenth of the
// relaxation time. Chains for the beta grid run in parallel on disjoint
// streams (stream = job index); results are deterministic per seed.
std::vector<ConcentrationRow> concentration_curve(
    const Game& game, const RwsParams& base, const std::vector<double>& betas,
    double eta, std::int64_t n, std::int64_t thin, std::uint64_t seed,
    const StatePoint& x_ref);

//! Stationary second-moment estimates E||p - x*||_2^2 per beta, their ratio
//! to (1-beta), and jackknife-over-blocks standard errors (block length of
//! one relaxation time). Requires a 2x2 game accepted by fixed_point_2x2
//! and n >= 2.
struct VarianceRow {
  double beta = 0.0;
  double second_moment = 0.0;
  double ratio = 0.0;  // second_moment / (1 - beta)
  double std_error = 0.0;
};

std::vector<VarianceRow> variance_scaling(const Game& game,
                                          const RwsParams& base,
                                          const std::vector<double>& betas,
                                          std::int64_t n, std::int64_t thin,
                                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Small statistical helpers shared by the verification suites
// ---------------------------------------------------------------------------

// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi_square_pvalue(double statistic, int dof);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

// Random point on the probability simplex (normalized exponentials).
Eigen::VectorXd random_simplex_point(int m, RngStream& rng);

}  // namespace rws
