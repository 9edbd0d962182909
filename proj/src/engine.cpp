#include "rws/engine.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rws {

namespace {

constexpr int kMaxStrategies = 32;

void check_small_enough(const Game& game) {
  if (game.m1() > kMaxStrategies || game.m2() > kMaxStrategies) {
    throw std::invalid_argument("simulation supports at most " +
                                std::to_string(kMaxStrategies) +
                                " strategies per role");
  }
}

// Best replies to an opponent count/weight vector, written into `out`
// (stack buffer); returns the tie count. Same band as best_reply_set.
int best_replies_raw(const Eigen::MatrixXd& payoff1,
                     const Eigen::MatrixXd& payoff2, int role,
                     const double* w, int* out) {
  const Eigen::MatrixXd& pay = role == 0 ? payoff1 : payoff2;
  const int m_role = role == 0 ? static_cast<int>(pay.rows())
                               : static_cast<int>(pay.cols());
  const int m_opp = role == 0 ? static_cast<int>(pay.cols())
                              : static_cast<int>(pay.rows());
  double u[kMaxStrategies];
  double umax = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < m_role; ++a) {
    double acc = 0.0;
    if (role == 0) {
      for (int s = 0; s < m_opp; ++s) acc += pay(a, s) * w[s];
    } else {
      for (int s = 0; s < m_opp; ++s) acc += pay(s, a) * w[s];
    }
    u[a] = acc;
    if (acc > umax) umax = acc;
  }
  const double band = kTieTolerance * std::max(1.0, std::abs(umax));
  int n = 0;
  for (int a = 0; a < m_role; ++a) {
    if (u[a] >= umax - band) out[n++] = a;
  }
  return n;
}

int sample_play_raw(const Game& game, int role, const double* freq,
                    const RwsParams& params, RngStream& rng) {
  const int m_role = game.num_strategies(role);
  const int m_opp = game.num_strategies(1 - role);
  if (params.epsilon > 0.0 && rng.uniform() < params.epsilon) {
    return rng.uniform_int(m_role);
  }
  double counts[kMaxStrategies] = {0};
  for (int j = 0; j < params.k; ++j) {
    const double u = rng.uniform();
    double acc = 0.0;
    int pick = m_opp - 1;
    for (int s = 0; s < m_opp; ++s) {
      acc += freq[s];
      if (u < acc) {
        pick = s;
        break;
      }
    }
    counts[pick] += 1.0;
  }
  int ties[kMaxStrategies];
  const int n = best_replies_raw(game.payoff1, game.payoff2, role, counts, ties);
  return n == 1 ? ties[0] : ties[rng.uniform_int(n)];
}

}  // namespace

void RwsParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("RwsParams: beta must lie in (0,1), got " +
                                std::to_string(beta));
  }
  if (k < 1) {
    throw std::invalid_argument("RwsParams: k must be a positive integer");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("RwsParams: epsilon must lie in [0,1], got " +
                                std::to_string(epsilon));
  }
}

std::string ergodicity_warning(const RwsParams& params, const Game& game) {
  const double bound = 1.0 - 1.0 / std::max(game.m1(), game.m2());
  if (params.beta <= bound) {
    std::ostringstream os;
    os << "beta = " << params.beta << " is at or below 1 - 1/max(m1,m2) = "
       << bound << "; uniform ergodicity of the chain is not guaranteed";
    return os.str();
  }
  return {};
}

void state_update_inplace(Eigen::VectorXd& p, int s, double beta) {
  p *= beta;
  p(s) += 1.0 - beta;
}

StatePoint state_update(const StatePoint& state, const PlayProfile& play,
                        double beta) {
  StatePoint next = state;
  state_update_inplace(next.p1, play.s1, beta);
  state_update_inplace(next.p2, play.s2, beta);
  return next;
}

Eigen::VectorXd exact_play_distribution(const Game& game, int role,
                                        const Eigen::VectorXd& opp_freq,
                                        const RwsParams& params,
                                        std::int64_t grid_cap) {
  params.validate();
  check_small_enough(game);
  validate_distribution(opp_freq, "exact_play_distribution: opp_freq");
  const int m_role = game.num_strategies(role);
  const int m_opp = game.num_strategies(1 - role);
  if (opp_freq.size() != m_opp) {
    throw std::invalid_argument(
        "exact_play_distribution: opp_freq length does not match the game");
  }

  Eigen::VectorXd out = Eigen::VectorXd::Constant(m_role, 1.0 / m_role);
  if (params.epsilon == 1.0) return out;  // pure-noise limit

  const std::int64_t grid = simplex_grid_size(m_opp, params.k);
  if (grid > grid_cap) {
    std::ostringstream os;
    os << "exact_play_distribution: count-vector grid has " << grid
       << " points, above the cap " << grid_cap
       << "; estimate by Monte Carlo (simulate_step) instead";
    throw std::runtime_error(os.str());
  }

  std::vector<double> lfact(params.k + 1, 0.0);
  for (int i = 2; i <= params.k; ++i) {
    lfact[i] = lfact[i - 1] + std::log(static_cast<double>(i));
  }
  // The pmf total equals (sum q)^k, which turns rounding-level deviations of
  // the input sum into k-fold larger output deviations; project first.
  const Eigen::VectorXd q = opp_freq / opp_freq.sum();
  std::vector<double> logq(m_opp);
  for (int s = 0; s < m_opp; ++s) {
    logq[s] = q(s) > 0.0 ? std::log(q(s))
                         : -std::numeric_limits<double>::infinity();
  }

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(m_role);
  for_each_count_vector(m_opp, params.k, [&](const int* x) {
    double logpmf = lfact[params.k];
    for (int s = 0; s < m_opp; ++s) {
      if (x[s] == 0) continue;
      if (q(s) == 0.0) return;  // unreachable count vector
      logpmf += x[s] * logq[s] - lfact[x[s]];
    }
    const double pmf = std::exp(logpmf);
    double counts[kMaxStrategies];
    for (int s = 0; s < m_opp; ++s) counts[s] = x[s];
    int ties[kMaxStrategies];
    const int n =
        best_replies_raw(game.payoff1, game.payoff2, role, counts, ties);
    const double share = pmf / n;
    for (int i = 0; i < n; ++i) acc(ties[i]) += share;
  });

  out = Eigen::VectorXd::Constant(m_role, params.epsilon / m_role) +
        (1.0 - params.epsilon) * acc;
  return out;
}

int sample_play(const Game& game, int role, const Eigen::VectorXd& opp_freq,
                const RwsParams& params, RngStream& rng) {
  params.validate();
  check_small_enough(game);
  if (opp_freq.size() != game.num_strategies(1 - role)) {
    throw std::invalid_argument("sample_play: opp_freq length mismatch");
  }
  return sample_play_raw(game, role, opp_freq.data(), params, rng);
}

int noisy_best_reply(const Game& game, int role,
                     const Eigen::VectorXd& opp_weights, double epsilon,
                     RngStream& rng) {
  check_small_enough(game);
  const int m_role = game.num_strategies(role);
  if (opp_weights.size() != game.num_strategies(1 - role)) {
    throw std::invalid_argument("noisy_best_reply: weight length mismatch");
  }
  if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.uniform_int(m_role);
  int ties[kMaxStrategies];
  const int n = best_replies_raw(game.payoff1, game.payoff2, role,
                                 opp_weights.data(), ties);
  return n == 1 ? ties[0] : ties[rng.uniform_int(n)];
}

PlayProfile simulate_step_inplace(StatePoint& state, const Game& game,
                                  const RwsParams& params, RngStream& rng) {
  check_small_enough(game);
  PlayProfile play;
  play.s1 = sample_play_raw(game, 0, state.p2.data(), params, rng);
  play.s2 = sample_play_raw(game, 1, state.p1.data(), params, rng);
  state_update_inplace(state.p1, play.s1, params.beta);
  state_update_inplace(state.p2, play.s2, params.beta);
  return play;
}

std::pair<StatePoint, PlayProfile> simulate_step(const StatePoint& state,
                                                 const Game& game,
                                                 const RwsParams& params,
                                                 RngStream& rng) {
  params.validate();
  check_small_enough(game);
  state.validate();
  StatePoint next = state;
  const PlayProfile play = simulate_step_inplace(next, game, params, rng);
  return {std::move(next), play};
}

Trajectory simulate_trajectory(const StatePoint& initial, const Game& game,
                               const RwsParams& params, std::int64_t horizon,
                               std::uint64_t seed, std::uint64_t stream) {
  params.validate();
  check_small_enough(game);
  initial.validate();
  if (horizon < 1) {
    throw std::invalid_argument("simulate_trajectory: horizon must be >= 1");
  }
  Trajectory traj;
  traj.params = params;
  traj.initial = initial;
  traj.seed = seed;
  traj.stream = stream;
  traj.states.reserve(horizon + 1);
  traj.plays.reserve(horizon);
  RngStream rng(seed, stream);
  StatePoint state = initial;
  traj.states.push_back(state);
  for (std::int64_t t = 0; t < horizon; ++t) {
    traj.plays.push_back(simulate_step_inplace(state, game, params, rng));
    traj.states.push_back(state);
  }
  return traj;
}

TransitionSupport transition_support(const StatePoint& state, const Game& game,
                                     const RwsParams& params,
                                     std::int64_t grid_cap) {
  state.validate();
  const Eigen::VectorXd d1 =
      exact_play_distribution(game, 0, state.p2, params, grid_cap);
  const Eigen::VectorXd d2 =
      exact_play_distribution(game, 1, state.p1, params, grid_cap);
  TransitionSupport support;
  support.successors.reserve(game.m1() * game.m2());
  for (int s1 = 0; s1 < game.m1(); ++s1) {
    for (int s2 = 0; s2 < game.m2(); ++s2) {
      TransitionSupport::Successor succ;
      succ.play = {s1, s2};
      succ.probability = d1(s1) * d2(s2);
      succ.state = state_update(state, succ.play, params.beta);
      support.successors.push_back(std::move(succ));
    }
  }
  return support;
}

ApproxHistory approximate_history(const Eigen::VectorXd& target, double beta,
                                  double delta) {
  validate_distribution(target, "approximate_history: target");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("approximate_history: beta must lie in (0,1)");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument(
        "approximate_history: delta must lie in (0,1); delta >= 1 would allow "
        "an empty history");
  }
  const int m = static_cast<int>(target.size());
  if ((1.0 - beta) * m > 1.0) {
    std::ostringstream os;
    os << "approximate_history: requires (1-beta)*m <= 1, got (1-" << beta
       << ")*" << m << " = " << (1.0 - beta) * m;
    throw std::invalid_argument(os.str());
  }

  // N = min{ n : beta^n < delta }
  int n_steps = 0;
  double pw = 1.0;
  while (pw >= delta) {
    pw *= beta;
    ++n_steps;
  }

  ApproxHistory hist;
  hist.plays.reserve(n_steps);
  hist.partial_sums = Eigen::VectorXd::Zero(m);
  double weight = 1.0 - beta;  // (1-beta) * beta^{t-1}
  for (int t = 1; t <= n_steps; ++t) {
    int pick = 0;
    double best = target(0) - hist.partial_sums(0);
    for (int j = 1; j < m; ++j) {
      const double deficit = target(j) - hist.partial_sums(j);
      if (deficit > best) {
        best = deficit;
        pick = j;
      }
    }
    hist.plays.push_back(pick);
    hist.partial_sums(pick) += weight;
    weight *= beta;
  }
  return hist;
}

}  // namespace rws
