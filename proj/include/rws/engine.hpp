#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rws/game.hpp"
#include "rws/grid.hpp"
#include "rws/rng.hpp"

namespace rws {

//! Parameters of the learning process: recency beta in (0,1), sample count
//! k >= 1, error (tremble) rate epsilon in [0,1].
struct RwsParams {
  double beta = 0.9;
  int k = 1;
  double epsilon = 0.0;

  void validate() const;  // throws std::invalid_argument
};

// Non-empty diagnostic when beta is at or below 1 - 1/max(m1, m2), the
// threshold below which uniform ergodicity of the chain is not guaranteed.
// A warning, not an error.
std::string ergodicity_warning(const RwsParams& params, const Game& game);

struct PlayProfile {
  int s1 = 0;  // 0-based row strategy
  int s2 = 0;  // 0-based column strategy
};

//! A simulated path: states[t+1] is the recency update of states[t] with
//! plays[t]; states.size() == plays.size() + 1.
struct Trajectory {
  RwsParams params;
  StatePoint initial;
  std::vector<StatePoint> states;
  std::vector<PlayProfile> plays;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// One-step state recursion p' = beta * p + (1 - beta) * unit(s).
void state_update_inplace(Eigen::VectorXd& p, int s, double beta);
StatePoint state_update(const StatePoint& state, const PlayProfile& play,
                        double beta);

//! Exact one-step play distribution of `role` given the opponent frequency
//! vector: component a equals
//!   epsilon/m + (1-epsilon) * sum over all size-k count vectors x of
//!   multinomial_pmf(x; k, opp_freq) * 1{a in BR(x)} / |BR(x)|.
//! Every component is >= epsilon/m and the vector sums to 1.
//! Throws std::runtime_error when the count-vector grid C(k+m-1, m-1)
//! exceeds `grid_cap` (Monte Carlo estimation via simulate_step is the
//! fallback at that scale).
Eigen::VectorXd exact_play_distribution(const Game& game, int role,
                                        const Eigen::VectorXd& opp_freq,
                                        const RwsParams& params,
                                        std::int64_t grid_cap = kDefaultGridCap);

// One noisy sampled best reply: with probability epsilon a uniform strategy;
// otherwise k opponent strategies are sampled from opp_freq and a uniform
// choice among the best replies to the sampled counts is played. Distributed
// exactly as exact_play_distribution.
int sample_play(const Game& game, int role, const Eigen::VectorXd& opp_freq,
                const RwsParams& params, RngStream& rng);

// Noisy best reply to an explicit opponent weight vector (e.g. sampled
// counts): epsilon-tremble to uniform, else uniform tie-break among the
// best replies within the kTieTolerance band. Shared with the baseline
// processes so that all processes resolve ties identically.
int noisy_best_reply(const Game& game, int role,
                     const Eigen::VectorXd& opp_weights, double epsilon,
                     RngStream& rng);

// Advances the state by one period: both roles sample independently from
// the pre-step state (role 0 first consumes the stream, then role 1).
PlayProfile simulate_step_inplace(StatePoint& state, const Game& game,
                                  const RwsParams& params, RngStream& rng);
std::pair<StatePoint, PlayProfile> simulate_step(const StatePoint& state,
                                                 const Game& game,
                                                 const RwsParams& params,
                                                 RngStream& rng);

//! Simulates `horizon` >= 1 periods from `initial`. Bit-reproducible for a
//! fixed (seed, stream) and parameter set.
Trajectory simulate_trajectory(const StatePoint& initial, const Game& game,
                               const RwsParams& params, std::int64_t horizon,
                               std::uint64_t seed, std::uint64_t stream = 0);

//! The one-step transition kernel restricted to its support: at most m1*m2
//! successor states, one per strategy profile, with probability equal to
//! the product of the two roles' exact play probabilities.
struct TransitionSupport {
  struct Successor {
    PlayProfile play;
    double probability;
    StatePoint state;
  };
  std::vector<Successor> successors;  // s1-major, then s2, ascending
};

TransitionSupport transition_support(const StatePoint& state, const Game& game,
                                     const RwsParams& params,
                                     std::int64_t grid_cap = kDefaultGridCap);

//! A finite play sequence whose geometrically weighted frequencies
//! approximate `target` from below: with N = min{ n : beta^n < delta },
//! the partial sums satisfy sums[j] in (max(target[j] - delta, 0), target[j]]
//! for every j. plays[t] carries weight (1-beta) * beta^t, i.e. plays are
//! ordered most recent first. Requires delta in (0,1) and
//! (1 - beta) * target.size() <= 1.
struct ApproxHistory {
  std::vector<int> plays;
  Eigen::VectorXd partial_sums;
};

ApproxHistory approximate_history(const Eigen::VectorXd& target, double beta,
                                  double delta);

}  // namespace rws
