#include "rws/meanfield.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rws {

namespace {

constexpr double kRenormDriftBound = 1e-8;

void renormalize(Eigen::VectorXd& p, double& drift) {
  Eigen::VectorXd clipped = p.cwiseMax(0.0);
  const double sum = clipped.sum();
  if (sum <= 0.0) {
    throw std::runtime_error("meanfield: state collapsed to the zero vector");
  }
  clipped /= sum;
  drift = std::max(drift, (clipped - p).lpNorm<Eigen::Infinity>());
  p = std::move(clipped);
}

struct Velocity {
  Eigen::VectorXd f1, f2;
};

Velocity eval_field(const Game& game, const RwsParams& params,
                    const Eigen::VectorXd& p1, const Eigen::VectorXd& p2,
                    std::int64_t grid_cap) {
  Velocity v;
  v.f1 = exact_play_distribution(game, 0, p2, params, grid_cap) - p1;
  v.f2 = exact_play_distribution(game, 1, p1, params, grid_cap) - p2;
  return v;
}

// RK4 stage points can drift marginally off the simplex; the field is
// polynomial in the state, so clipping and rescaling them is harmless and
// keeps every evaluation inside the validated domain.
Velocity eval_field_projected(const Game& game, const RwsParams& params,
                              Eigen::VectorXd p1, Eigen::VectorXd p2,
                              std::int64_t grid_cap) {
  double drift = 0.0;
  renormalize(p1, drift);
  renormalize(p2, drift);
  return eval_field(game, params, p1, p2, grid_cap);
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> vector_field(
    const Game& game, const RwsParams& params, const StatePoint& x,
    std::int64_t grid_cap) {
  x.validate();
  Velocity v = eval_field(game, params, x.p1, x.p2, grid_cap);
  return {std::move(v.f1), std::move(v.f2)};
}

double vector_field_sup_norm(const Game& game, const RwsParams& params,
                             const StatePoint& x, std::int64_t grid_cap) {
  const auto [f1, f2] = vector_field(game, params, x, grid_cap);
  return std::max(f1.lpNorm<Eigen::Infinity>(), f2.lpNorm<Eigen::Infinity>());
}

MeanPath integrate_meanfield(const Game& game, const RwsParams& params,
                             const StatePoint& x0, double horizon, double dt,
                             std::int64_t grid_cap) {
  params.validate();
  x0.validate();
  if (!(dt > 0.0) || horizon < dt) {
    throw std::invalid_argument(
        "integrate_meanfield: need dt > 0 and horizon >= dt");
  }
  const std::int64_t steps = static_cast<std::int64_t>(std::llround(horizon / dt));

  MeanPath path;
  path.params = params;
  path.dt = dt;
  path.times.reserve(steps + 1);
  path.points.reserve(steps + 1);

  Eigen::VectorXd p1 = x0.p1, p2 = x0.p2;
  path.times.push_back(0.0);
  path.points.push_back(x0);
  for (std::int64_t i = 1; i <= steps; ++i) {
    const Velocity k1 = eval_field(game, params, p1, p2, grid_cap);
    const Velocity k2 = eval_field_projected(
        game, params, p1 + 0.5 * dt * k1.f1, p2 + 0.5 * dt * k1.f2, grid_cap);
    const Velocity k3 = eval_field_projected(
        game, params, p1 + 0.5 * dt * k2.f1, p2 + 0.5 * dt * k2.f2, grid_cap);
    const Velocity k4 = eval_field_projected(game, params, p1 + dt * k3.f1,
                                             p2 + dt * k3.f2, grid_cap);
    p1 += dt / 6.0 * (k1.f1 + 2.0 * k2.f1 + 2.0 * k3.f1 + k4.f1);
    p2 += dt / 6.0 * (k1.f2 + 2.0 * k2.f2 + 2.0 * k3.f2 + k4.f2);

    double drift = 0.0;
    renormalize(p1, drift);
    renormalize(p2, drift);
    path.max_renorm_drift = std::max(path.max_renorm_drift, drift);
    if (drift > kRenormDriftBound) {
      std::ostringstream os;
      os << "integrate_meanfield: simplex drift " << drift
         << " exceeds the per-step bound " << kRenormDriftBound
         << "; reduce dt";
      throw std::runtime_error(os.str());
    }
    path.times.push_back(i * dt);
    path.points.push_back(StatePoint{p1, p2});
  }
  return path;
}

double rho(int k, int cutoff, double epsilon, double x) {
  if (k < 1 || cutoff < 0 || cutoff > k) {
    throw std::invalid_argument("rho: requires k >= 1 and 0 <= cutoff <= k");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0) || !(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("rho: epsilon and x must lie in [0,1]");
  }
  double tail = 0.0;
  if (k <= 50) {
    // Binomial coefficients are exact below 2^53 here; at x = 1/2 every
    // term is an exact dyadic, so odd-k symmetry gives tail == 0.5 exactly.
    double coeff = 1.0;  // C(k, i)
    for (int i = 1; i <= k; ++i) {
      coeff = coeff * (k - i + 1) / i;
      if (i <= cutoff) continue;
      tail += coeff * std::pow(x, i) * std::pow(1.0 - x, k - i);
    }
  } else {
    for (int i = cutoff + 1; i <= k; ++i) {
      if (x == 0.0) break;
      if (x == 1.0) {
        tail = 1.0;
        break;
      }
      double logterm = std::lgamma(k + 1.0) - std::lgamma(i + 1.0) -
                       std::lgamma(k - i + 1.0) + i * std::log(x) +
                       (k - i) * std::log1p(-x);
      tail += std::exp(logterm);
    }
  }
  return (1.0 - epsilon) * tail + epsilon / 2.0;
}

namespace {

// Pure best-reply pattern of one role in a 2x2 game: +1 when the role
// matches the opponent's pure strategy, -1 when it mismatches, 0 otherwise.
int role_orientation(const Game& game, int role) {
  const auto br_to = [&](int opp_strategy) {
    Eigen::VectorXd pure = Eigen::VectorXd::Zero(2);
    pure(opp_strategy) = 1.0;
    return best_reply_set(game, role, pure);
  };
  const std::vector<int> br0 = br_to(0);
  const std::vector<int> br1 = br_to(1);
  if (br0.size() != 1 || br1.size() != 1) return 0;
  if (br0[0] == 0 && br1[0] == 1) return +1;  // agreeing
  if (br0[0] == 1 && br1[0] == 0) return -1;  // disagreeing
  return 0;
}

}  // namespace

FixedPointResult fixed_point_2x2(const Game& game, const RwsParams& params) {
  params.validate();
  game.validate();
  if (game.m1() != 2 || game.m2() != 2) {
    throw std::invalid_argument("fixed_point_2x2: game must be 2x2");
  }

  const NashResult nash = solve_nash_small(game);
  if (nash.equilibria.size() != 1) {
    throw std::invalid_argument(
        "fixed_point_2x2: game must have a unique Nash equilibrium; found " +
        std::to_string(nash.equilibria.size()));
  }
  const NashEquilibrium& eq = nash.equilibria.front();
  const double interior = 1e-9;
  if (eq.s1.minCoeff() < interior || eq.s2.minCoeff() < interior) {
    throw std::invalid_argument(
        "fixed_point_2x2: the unique equilibrium is not completely mixed");
  }

  const int o1 = role_orientation(game, 0);
  const int o2 = role_orientation(game, 1);
  if (o1 * o2 != -1) {
    throw std::invalid_argument(
        "fixed_point_2x2: roles do not split into one agreeing and one "
        "disagreeing player; use fixed_point_general");
  }
  const int agree_role = o1 == +1 ? 0 : 1;
  const int disagree_role = 1 - agree_role;

  // Nash probability of strategy 1 (index 0) per role, and the cut-offs.
  auto nash_high = [&](int role) { return role == 0 ? eq.s1(0) : eq.s2(0); };
  const double xa_hat = nash_high(agree_role);
  const double xd_hat = nash_high(disagree_role);
  for (double v : {xa_hat * params.k, xd_hat * params.k}) {
    if (std::abs(v - std::llround(v)) <= 1e-9) {
      std::ostringstream os;
      os << "fixed_point_2x2: cut-off construction requires non-integer "
            "x_hat*k, got "
         << v;
      throw IntegerCutoffError(os.str());
    }
  }
  const int cut_a = static_cast<int>(std::floor(xa_hat * params.k));
  const int cut_d = static_cast<int>(std::floor(xd_hat * params.k));

  // Agreeing role plays its high strategy when more than cut_d of its k
  // samples from the disagreeing history are high; the disagreeing role
  // mirrors with cut_a.
  const auto rho_a = [&](double d) { return rho(params.k, cut_d, params.epsilon, d); };
  const auto rho_d = [&](double a) {
    return 1.0 - rho(params.k, cut_a, params.epsilon, a);
  };
  const auto h = [&](double x) { return rho_a(rho_d(x)) - x; };

  double lo = params.epsilon / 2.0;
  double hi = 1.0 - params.epsilon / 2.0;
  if (!(h(lo) > 0.0 && h(hi) < 0.0)) {
    throw std::runtime_error(
        "fixed_point_2x2: bisection bracket failed its sign check");
  }
  double xa = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double hv = h(xa);
    if (hv == 0.0) break;
    (hv > 0.0 ? lo : hi) = xa;
    const double next = 0.5 * (lo + hi);
    if (next == xa) break;
    xa = next;
  }
  const double xd = rho_d(xa);

  FixedPointResult result;
  Eigen::VectorXd pa(2), pd(2);
  pa << xa, 1.0 - xa;
  pd << xd, 1.0 - xd;
  result.x_star.p1 = agree_role == 0 ? pa : pd;
  result.x_star.p2 = agree_role == 0 ? pd : pa;
  result.method = "rho-bisection";
  result.nash_reference = StatePoint{eq.s1, eq.s2};
  result.residual = vector_field_sup_norm(game, params, result.x_star);
  result.converged = result.residual < 1e-12 && std::abs(h(xa)) < 1e-12;
  return result;
}

FixedPointResult fixed_point_general(const Game& game, const RwsParams& params,
                                     const StatePoint& x0,
                                     std::int64_t grid_cap) {
  params.validate();
  x0.validate();
  constexpr double kTol = 1e-10;
  constexpr int kMaxIter = 100000;

  StatePoint x = x0;
  double residual = 0.0;
  FixedPointResult result;
  result.method = "damped-iteration";
  for (int it = 0; it < kMaxIter; ++it) {
    const Eigen::VectorXd g1 =
        exact_play_distribution(game, 0, x.p2, params, grid_cap);
    const Eigen::VectorXd g2 =
        exact_play_distribution(game, 1, x.p1, params, grid_cap);
    residual = std::max((g1 - x.p1).lpNorm<Eigen::Infinity>(),
                        (g2 - x.p2).lpNorm<Eigen::Infinity>());
    if (residual < kTol) {
      result.x_star = x;
      result.residual = residual;
      result.converged = true;
      return result;
    }
    x.p1 = 0.5 * x.p1 + 0.5 * g1;
    x.p2 = 0.5 * x.p2 + 0.5 * g2;
  }

  // Rotation-dominant fields defeat the damped map; fall back to the flow.
  result.method = "damped-iteration+rk4";
  MeanPath path = integrate_meanfield(game, params, x, 300.0, 0.01, grid_cap);
  result.x_star = path.points.back();
  result.residual = vector_field_sup_norm(game, params, result.x_star, grid_cap);
  result.converged = result.residual < kTol;
  return result;
}

LyapunovCheck lyapunov_check(const MeanPath& path, const StatePoint& x_star) {
  if (path.points.empty()) {
    throw std::invalid_argument("lyapunov_check: empty path");
  }
  LyapunovCheck check;
  check.v.reserve(path.points.size());
  for (const StatePoint& x : path.points) {
    const double v = 0.5 * ((x.p1 - x_star.p1).squaredNorm() +
                            (x.p2 - x_star.p2).squaredNorm());
    if (!check.v.empty()) {
      check.max_increment = std::max(check.max_increment, v - check.v.back());
    }
    check.v.push_back(v);
  }
  return check;
}

}  // namespace rws
