#include "rws/curb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>

namespace rws {

namespace {

bool subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

void check_block(const Game& game, const Block& block) {
  if (block.c1.empty() || block.c2.empty()) {
    throw std::invalid_argument("block: both sides must be nonempty");
  }
  if (!std::is_sorted(block.c1.begin(), block.c1.end()) ||
      !std::is_sorted(block.c2.begin(), block.c2.end())) {
    throw std::invalid_argument("block: strategy lists must be sorted");
  }
  if (block.c1.front() < 0 || block.c1.back() >= game.m1() ||
      block.c2.front() < 0 || block.c2.back() >= game.m2()) {
    throw std::invalid_argument("block: strategy index out of range");
  }
}

// Best replies of `role` to an opponent count vector given over the full
// strategy space. Exact int64 payoff comparisons when available, else the
// kTieTolerance band; ties always produce the full set.
void best_replies_to_counts(const Game& game, bool exact, int role,
                            const Eigen::VectorXi& counts,
                            std::set<int>& out) {
  const int m_role = game.num_strategies(role);
  const int m_opp = game.num_strategies(1 - role);
  const Eigen::MatrixXd& pay = role == 0 ? game.payoff1 : game.payoff2;
  if (m_role > 64) {
    throw std::invalid_argument("closure: more than 64 strategies per role");
  }
  if (exact) {
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    std::int64_t u[64];
    for (int a = 0; a < m_role; ++a) {
      std::int64_t acc = 0;
      for (int s = 0; s < m_opp; ++s) {
        const double entry = role == 0 ? pay(a, s) : pay(s, a);
        acc += static_cast<std::int64_t>(entry) * counts(s);
      }
      u[a] = acc;
      best = std::max(best, acc);
    }
    for (int a = 0; a < m_role; ++a) {
      if (u[a] == best) out.insert(a);
    }
  } else {
    Eigen::VectorXd w = counts.cast<double>();
    for (int a : best_reply_set(game, role, w)) out.insert(a);
  }
}

// Closure additions for one role: best replies to every lattice point
// supported on the opponent side of the block.
void collect_replies(const Game& game, bool exact, int role,
                     const std::vector<int>& opp_side, int k, std::int64_t cap,
                     std::set<int>& out) {
  const int m_opp = game.num_strategies(1 - role);
  const int support = static_cast<int>(opp_side.size());
  if (simplex_grid_size(support, k) > cap) {
    throw std::runtime_error("k_best_reply_closure: lattice size exceeds cap");
  }
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(m_opp);
  for_each_count_vector(support, k, [&](const int* x) {
    counts.setZero();
    for (int i = 0; i < support; ++i) counts(opp_side[i]) = x[i];
    best_replies_to_counts(game, exact, role, counts, out);
  });
}

Block normalized(std::set<int> c1, std::set<int> c2) {
  Block b;
  b.c1.assign(c1.begin(), c1.end());
  b.c2.assign(c2.begin(), c2.end());
  return b;
}

}  // namespace

bool Block::contains(const Block& other) const {
  return subset(other.c1, c1) && subset(other.c2, c2);
}

bool Block::strictly_contains(const Block& other) const {
  return contains(other) && !(*this == other);
}

Block full_block(const Game& game) {
  Block b;
  for (int i = 0; i < game.m1(); ++i) b.c1.push_back(i);
  for (int j = 0; j < game.m2(); ++j) b.c2.push_back(j);
  return b;
}

std::vector<Eigen::VectorXi> simplex_grid(int m, int k, std::int64_t cap) {
  if (m < 1 || k < 1) {
    throw std::invalid_argument("simplex_grid: need m >= 1 and k >= 1");
  }
  const std::int64_t size = simplex_grid_size(m, k);
  if (size > cap) {
    throw std::runtime_error("simplex_grid: C(k+m-1, m-1) = " +
                             std::to_string(size) + " exceeds cap " +
                             std::to_string(cap));
  }
  std::vector<Eigen::VectorXi> grid;
  grid.reserve(size);
  for_each_count_vector(m, k, [&](const int* x) {
    Eigen::VectorXi v(m);
    for (int i = 0; i < m; ++i) v(i) = x[i];
    grid.push_back(std::move(v));
  });
  return grid;
}

Block k_best_reply_closure(const Game& game, const Block& seed, int k,
                           std::int64_t cap) {
  game.validate();
  check_block(game, seed);
  if (k < 1) throw std::invalid_argument("k_best_reply_closure: k >= 1");
  const bool exact = game.has_integer_payoffs();

  std::set<int> c1(seed.c1.begin(), seed.c1.end());
  std::set<int> c2(seed.c2.begin(), seed.c2.end());
  for (;;) {
    std::set<int> next1 = c1, next2 = c2;
    collect_replies(game, exact, 0, std::vector<int>(c2.begin(), c2.end()), k,
                    cap, next1);
    collect_replies(game, exact, 1, std::vector<int>(c1.begin(), c1.end()), k,
                    cap, next2);
    if (next1 == c1 && next2 == c2) break;
    c1.swap(next1);
    c2.swap(next2);
  }
  return normalized(std::move(c1), std::move(c2));
}

std::vector<Block> minimal_k_curb_blocks(const Game& game, int k,
                                         std::int64_t cap,
                                         int max_total_strategies) {
  game.validate();
  if (game.m1() + game.m2() > max_total_strategies) {
    throw std::invalid_argument(
        "minimal_k_curb_blocks: game exceeds the size limit of " +
        std::to_string(max_total_strategies) + " total strategies");
  }
  // Every minimal closed block B is the closure of any singleton inside it:
  // for (i,j) in B the closure of {i}x{j} is a closed block contained in B
  // (closure is monotone and B is closed), so minimality forces equality.
  // The singleton closures therefore contain all minimal blocks, and
  // discarding every candidate that strictly contains another candidate
  // leaves exactly the minimal ones.
  std::vector<Block> candidates;
  for (int i = 0; i < game.m1(); ++i) {
    for (int j = 0; j < game.m2(); ++j) {
      Block closure = k_best_reply_closure(game, Block{{i}, {j}}, k, cap);
      if (std::find(candidates.begin(), candidates.end(), closure) ==
          candidates.end()) {
        candidates.push_back(std::move(closure));
      }
    }
  }
  std::vector<Block> minimal;
  for (const Block& b : candidates) {
    bool has_smaller = false;
    for (const Block& other : candidates) {
      if (b.strictly_contains(other)) {
        has_smaller = true;
        break;
      }
    }
    if (!has_smaller) minimal.push_back(b);
  }
  std::sort(minimal.begin(), minimal.end(), [](const Block& a, const Block& b) {
    if (a.c1 != b.c1) return a.c1 < b.c1;
    return a.c2 < b.c2;
  });
  return minimal;
}

bool in_neighborhood(const StatePoint& state, const Block& block,
                     double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("in_neighborhood: delta must lie in [0,1]");
  }
  double mass1 = 0.0, mass2 = 0.0;
  for (int s : block.c1) mass1 += state.p1(s);
  for (int s : block.c2) mass2 += state.p2(s);
  return mass1 >= 1.0 - delta && mass2 >= 1.0 - delta;
}

nlohmann::json curb_report(const Game& game, int k,
                           const std::vector<Block>& blocks) {
  nlohmann::json doc;
  doc["game"] = game.name;
  doc["k"] = k;
  doc["minimal_blocks"] = nlohmann::json::array();
  for (const Block& b : blocks) {
    nlohmann::json jb;
    jb["c1"] = nlohmann::json::array();
    jb["c2"] = nlohmann::json::array();
    for (int s : b.c1) jb["c1"].push_back(s + 1);
    for (int s : b.c2) jb["c2"].push_back(s + 1);
    doc["minimal_blocks"].push_back(std::move(jb));
  }
  return doc;
}

}  // namespace rws
