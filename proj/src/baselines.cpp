#include "rws/baselines.hpp"

#include <stdexcept>

namespace rws {

YoungProcess::YoungProcess(const Game& game,
                           std::vector<PlayProfile> initial_memory, int k,
                           double epsilon)
    : memory_(std::move(initial_memory)), k_(k), epsilon_(epsilon) {
  game.validate();
  if (memory_.empty()) {
    throw std::invalid_argument("YoungProcess: memory must be nonempty");
  }
  if (k_ < 1 || k_ > memory_length()) {
    throw std::invalid_argument(
        "YoungProcess: requires 1 <= k <= memory length");
  }
  if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0)) {
    throw std::invalid_argument("YoungProcess: epsilon must lie in [0,1]");
  }
  counts1_ = Eigen::VectorXd::Zero(game.m1());
  counts2_ = Eigen::VectorXd::Zero(game.m2());
  for (const PlayProfile& p : memory_) {
    if (p.s1 < 0 || p.s1 >= game.m1() || p.s2 < 0 || p.s2 >= game.m2()) {
      throw std::invalid_argument("YoungProcess: play index out of range");
    }
    counts1_(p.s1) += 1.0;
    counts2_(p.s2) += 1.0;
  }
}

YoungProcess YoungProcess::from_profile(const Game& game, int memory_length,
                                        int k, double epsilon,
                                        const Eigen::VectorXd& s1,
                                        const Eigen::VectorXd& s2,
                                        RngStream& rng) {
  validate_distribution(s1, "YoungProcess: s1");
  validate_distribution(s2, "YoungProcess: s2");
  std::vector<PlayProfile> memory(memory_length);
  for (PlayProfile& p : memory) {
    p.s1 = rng.categorical(s1.data(), static_cast<int>(s1.size()));
    p.s2 = rng.categorical(s2.data(), static_cast<int>(s2.size()));
  }
  return YoungProcess(game, std::move(memory), k, epsilon);
}

PlayProfile YoungProcess::step(const Game& game, RngStream& rng) {
  const int m = memory_length();
  if (static_cast<int>(scratch_.size()) != m) {
    scratch_.resize(m);
    for (int i = 0; i < m; ++i) scratch_[i] = i;
  }
  PlayProfile play;

  // Role 0 responds to sampled column plays, role 1 to sampled row plays.
  // Each role draws k distinct memory positions (partial Fisher-Yates).
  for (int role = 0; role < 2; ++role) {
    Eigen::VectorXd counts =
        Eigen::VectorXd::Zero(game.num_strategies(1 - role));
    for (int i = 0; i < k_; ++i) {
      const int j = i + rng.uniform_int(m - i);
      std::swap(scratch_[i], scratch_[j]);
      const PlayProfile& p = memory_[(head_ + scratch_[i]) % m];
      counts(role == 0 ? p.s2 : p.s1) += 1.0;
    }
    const int s = noisy_best_reply(game, role, counts, epsilon_, rng);
    (role == 0 ? play.s1 : play.s2) = s;
  }

  const PlayProfile evicted = memory_[head_];
  counts1_(evicted.s1) -= 1.0;
  counts2_(evicted.s2) -= 1.0;
  memory_[head_] = play;
  head_ = (head_ + 1) % m;
  counts1_(play.s1) += 1.0;
  counts2_(play.s2) += 1.0;
  return play;
}

std::vector<PlayProfile> YoungProcess::memory_snapshot() const {
  std::vector<PlayProfile> out;
  out.reserve(memory_.size());
  for (std::size_t i = 0; i < memory_.size(); ++i) {
    out.push_back(memory_[(head_ + i) % memory_.size()]);
  }
  return out;
}

StatePoint YoungProcess::memory_frequencies() const {
  StatePoint freq;
  freq.p1 = counts1_ / static_cast<double>(memory_.size());
  freq.p2 = counts2_ / static_cast<double>(memory_.size());
  return freq;
}

PlayProfile fp_recency_step(FpRecencyState& state, const Game& game) {
  PlayProfile play;
  play.s1 = best_reply_set(game, 0, state.beliefs.p2).front();
  play.s2 = best_reply_set(game, 1, state.beliefs.p1).front();
  state_update_inplace(state.beliefs.p1, play.s1, state.beta);
  state_update_inplace(state.beliefs.p2, play.s2, state.beta);
  return play;
}

}  // namespace rws
