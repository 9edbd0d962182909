#pragma once

#include <vector>

#include "rws/engine.hpp"
#include "rws/game.hpp"
#include "rws/rng.hpp"

namespace rws {

//! Finite-memory adaptive play: the last `memory_length` profiles are the
//! state; each role samples k of the remembered opponent plays uniformly
//! without replacement, best-replies to the sampled mix and trembles to a
//! uniform strategy with probability epsilon.
class YoungProcess {
 public:
  // Memory seeded with an explicit play record, oldest first; its length
  // fixes the memory length. Requires 1 <= k <= memory length.
  YoungProcess(const Game& game, std::vector<PlayProfile> initial_memory,
               int k, double epsilon);

  // Memory filled with i.i.d. draws from the product profile (s1, s2).
  static YoungProcess from_profile(const Game& game, int memory_length, int k,
                                   double epsilon, const Eigen::VectorXd& s1,
                                   const Eigen::VectorXd& s2, RngStream& rng);

  // Plays one period: appends the realized profile, evicts the oldest.
  PlayProfile step(const Game& game, RngStream& rng);

  int memory_length() const { return static_cast<int>(memory_.size()); }
  int k() const { return k_; }
  double epsilon() const { return epsilon_; }

  // Memory contents in age order, oldest first.
  std::vector<PlayProfile> memory_snapshot() const;

  // Empirical frequency of each role's plays over the memory.
  StatePoint memory_frequencies() const;

 private:
  std::vector<PlayProfile> memory_;  // ring buffer
  std::size_t head_ = 0;             // index of the oldest entry
  int k_;
  double epsilon_;
  Eigen::VectorXd counts1_, counts2_;
  std::vector<int> scratch_;  // sampling workspace
};

//! Deterministic fictitious play with recency-weighted beliefs: each role
//! plays the lowest-index best reply to the opposing belief vector, and
//! beliefs follow the same geometric recursion as the sampler's state.
struct FpRecencyState {
  StatePoint beliefs;
  double beta = 0.9;
};

PlayProfile fp_recency_step(FpRecencyState& state, const Game& game);

}  // namespace rws
