#include "rws/stats.hpp"

#include "rws/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

namespace rws {

std::int64_t default_burn_in(double beta) {
  return static_cast<std::int64_t>(std::ceil(10.0 / (1.0 - beta)));
}

EmpiricalMeasure estimate_invariant(const Game& game, const RwsParams& params,
                                    std::int64_t burn_in, std::int64_t n,
                                    std::int64_t thin, std::uint64_t seed,
                                    const StatePoint* start,
                                    std::uint64_t stream) {
  params.validate();
  if (n < 1) throw std::invalid_argument("estimate_invariant: n >= 1");
  if (thin < 1) throw std::invalid_argument("estimate_invariant: thin >= 1");
  if (burn_in < 0) burn_in = default_burn_in(params.beta);

  EmpiricalMeasure measure;
  measure.params = params;
  measure.game_name = game.name;
  measure.seed = seed;
  measure.stream = stream;
  measure.burn_in = burn_in;
  measure.thin = thin;
  measure.samples.reserve(n);

  RngStream rng(seed, stream);
  StatePoint state = start ? *start : uniform_state(game);
  state.validate();
  for (std::int64_t t = 0; t < burn_in; ++t) {
    simulate_step_inplace(state, game, params, rng);
  }
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t t = 0; t < thin; ++t) {
      simulate_step_inplace(state, game, params, rng);
    }
    measure.samples.push_back(state);
  }
  return measure;
}

double w1_marginal(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || a.size() != b.size()) {
    throw std::invalid_argument(
        "w1_marginal: samples must be nonempty and of equal size");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

ErgodicityReport ergodicity_decay(const Game& game, const RwsParams& params,
                                  const StatePoint& start_a,
                                  const StatePoint& start_b,
                                  std::int64_t window, std::int64_t horizon,
                                  std::uint64_t seed) {
  params.validate();
  start_a.validate();
  start_b.validate();
  if (window < 1 || horizon < window || horizon % window != 0) {
    throw std::invalid_argument(
        "ergodicity_decay: horizon must be a positive multiple of window");
  }
  const std::int64_t num_windows = horizon / window;
  const int num_coords = game.m1() + game.m2();

  // One stream, two chains: the shared draws couple the chains, so the
  // windowed distance tracks the contraction of the kernel rather than
  // Monte Carlo noise between independent runs.
  RngStream rng_a(seed, 0), rng_b(seed, 0);
  StatePoint a = start_a, b = start_b;

  ErgodicityReport report;
  report.window = window;
  report.window_distance.reserve(num_windows);
  std::vector<std::vector<double>> samples_a(num_coords), samples_b(num_coords);
  for (std::int64_t w = 0; w < num_windows; ++w) {
    for (auto& v : samples_a) v.clear();
    for (auto& v : samples_b) v.clear();
    for (std::int64_t t = 0; t < window; ++t) {
      simulate_step_inplace(a, game, params, rng_a);
      simulate_step_inplace(b, game, params, rng_b);
      int c = 0;
      for (int i = 0; i < game.m1(); ++i, ++c) {
        samples_a[c].push_back(a.p1(i));
        samples_b[c].push_back(b.p1(i));
      }
      for (int i = 0; i < game.m2(); ++i, ++c) {
        samples_a[c].push_back(a.p2(i));
        samples_b[c].push_back(b.p2(i));
      }
    }
    double dist = 0.0;
    for (int c = 0; c < num_coords; ++c) {
      dist = std::max(dist, w1_marginal(samples_a[c], samples_b[c]));
    }
    report.window_distance.push_back(dist);
  }

  std::vector<double> xs(num_windows), ys(num_windows);
  for (std::int64_t w = 0; w < num_windows; ++w) {
    xs[w] = static_cast<double>(w);
    // Coupled chains can coalesce exactly; floor the distance at 1e-15 so
    // the log fit stays finite.
    ys[w] = std::log10(std::max(report.window_distance[w], 1e-15));
  }
  const LineFit fit = fit_line(xs, ys);
  report.slope = fit.slope;
  report.r_squared = fit.r_squared;
  return report;
}

double occupancy_fraction(const std::vector<StatePoint>& states,
                          const std::vector<Block>& blocks, double delta) {
  if (states.empty()) {
    throw std::invalid_argument("occupancy_fraction: no states");
  }
  if (blocks.empty()) {
    throw std::invalid_argument("occupancy_fraction: no blocks");
  }
  std::int64_t inside = 0;
  for (const StatePoint& x : states) {
    for (const Block& b : blocks) {
      if (in_neighborhood(x, b, delta)) {
        ++inside;
        break;
      }
    }
  }
  return static_cast<double>(inside) / static_cast<double>(states.size());
}

double occupancy_fraction(const Trajectory& traj,
                          const std::vector<Block>& blocks, double delta) {
  return occupancy_fraction(traj.states, blocks, delta);
}

namespace {

std::int64_t auto_thin(double beta) {
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::llround(0.1 / (1.0 - beta))));
}

template <class Row, class Job>
std::vector<Row> run_beta_grid(const std::vector<double>& betas, Job&& job) {
  std::vector<std::future<Row>> futures;
  futures.reserve(betas.size());
  for (std::size_t i = 0; i < betas.size(); ++i) {
    futures.push_back(
        std::async(std::launch::async, job, betas[i], static_cast<std::uint64_t>(i)));
  }
  std::vector<Row> rows;
  rows.reserve(betas.size());
  for (auto& f : futures) rows.push_back(f.get());
  return rows;
}

}  // namespace

std::vector<ConcentrationRow> concentration_curve(
    const Game& game, const RwsParams& base, const std::vector<double>& betas,
    double eta, std::int64_t n, std::int64_t thin, std::uint64_t seed,
    const StatePoint& x_ref) {
  if (betas.empty()) {
    throw std::invalid_argument("concentration_curve: empty beta grid");
  }
  if (!(eta >= 0.0)) {
    throw std::invalid_argument("concentration_curve: eta must be >= 0");
  }
  x_ref.validate();

  auto job = [&](double beta, std::uint64_t stream) {
    RwsParams params = base;
    params.beta = beta;
    const std::int64_t stride = thin > 0 ? thin : auto_thin(beta);
    const EmpiricalMeasure measure = estimate_invariant(
        game, params, -1, n, stride, seed, &x_ref, stream);
    std::int64_t exceed = 0;
    for (const StatePoint& x : measure.samples) {
      const double dist =
          std::max((x.p1 - x_ref.p1).lpNorm<Eigen::Infinity>(),
                   (x.p2 - x_ref.p2).lpNorm<Eigen::Infinity>());
      if (dist >= eta) ++exceed;
    }
    ConcentrationRow row;
    row.beta = beta;
    row.eta = eta;
    row.n = n;
    row.probability = static_cast<double>(exceed) / static_cast<double>(n);
    row.std_error =
        std::sqrt(row.probability * (1.0 - row.probability) / static_cast<double>(n));
    return row;
  };
  return run_beta_grid<ConcentrationRow>(betas, job);
}

std::vector<VarianceRow> variance_scaling(const Game& game,
                                          const RwsParams& base,
                                          const std::vector<double>& betas,
                                          std::int64_t n, std::int64_t thin,
                                          std::uint64_t seed) {
  if (betas.empty()) {
    throw std::invalid_argument("variance_scaling: empty beta grid");
  }
  if (n < 2) {
    throw std::invalid_argument(
        "variance_scaling: second-moment estimation needs n >= 2");
  }
  // The stationary point of the mean process depends on (k, epsilon) only.
  const FixedPointResult fp = fixed_point_2x2(game, base);
  const StatePoint& x_star = fp.x_star;

  auto job = [&, x_star](double beta, std::uint64_t stream) {
    RwsParams params = base;
    params.beta = beta;
    const std::int64_t stride = thin > 0 ? thin : auto_thin(beta);
    const EmpiricalMeasure measure =
        estimate_invariant(game, params, -1, n, stride, seed, &x_star, stream);

    std::vector<double> d2;
    d2.reserve(measure.samples.size());
    for (const StatePoint& x : measure.samples) {
      d2.push_back((x.p1 - x_star.p1).squaredNorm() +
                   (x.p2 - x_star.p2).squaredNorm());
    }
    const double mean =
        std::accumulate(d2.begin(), d2.end(), 0.0) / static_cast<double>(d2.size());

    // Jackknife over blocks of one relaxation time (in samples), clamped so
    // at least two blocks exist.
    std::int64_t block_len = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(
               std::llround(1.0 / ((1.0 - beta) * static_cast<double>(stride)))));
    block_len = std::max<std::int64_t>(
        1, std::min<std::int64_t>(block_len,
                                  static_cast<std::int64_t>(d2.size()) / 2));
    const std::int64_t usable =
        static_cast<std::int64_t>(d2.size()) / block_len;
    double total = 0.0;
    std::vector<double> block_sums(usable, 0.0);
    for (std::int64_t b = 0; b < usable; ++b) {
      for (std::int64_t i = b * block_len; i < (b + 1) * block_len; ++i) {
        block_sums[b] += d2[i];
      }
      total += block_sums[b];
    }
    const double count = static_cast<double>(usable * block_len);
    double ss = 0.0;
    for (std::int64_t b = 0; b < usable; ++b) {
      const double left_out =
          (total - block_sums[b]) / (count - static_cast<double>(block_len));
      const double full = total / count;
      ss += (left_out - full) * (left_out - full);
    }
    const double nb = static_cast<double>(usable);
    VarianceRow row;
    row.beta = beta;
    row.second_moment = mean;
    row.ratio = mean / (1.0 - beta);
    row.std_error = std::sqrt((nb - 1.0) / nb * ss);
    return row;
  };
  return run_beta_grid<VarianceRow>(betas, job);
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

namespace {

// Regularized upper incomplete gamma Q(a, x), series / continued fraction.
double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad args");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // P(a,x) by series, Q = 1 - P
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // Q(a,x) by Lentz continued fraction
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_pvalue(double statistic, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof >= 1");
  if (statistic <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("fit_line: need >= 2 points of equal count");
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate xs");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  const double ss_tot = syy - sy * sy / n;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

Eigen::VectorXd random_simplex_point(int m, RngStream& rng) {
  Eigen::VectorXd v(m);
  for (int i = 0; i < m; ++i) {
    v(i) = -std::log(1.0 - rng.uniform());
  }
  return v / v.sum();
}

}  // namespace rws
