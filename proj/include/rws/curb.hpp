#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "rws/game.hpp"
#include "rws/grid.hpp"

namespace rws {

//! A product block C1 x C2 of pure strategies (0-based, sorted ascending,
//! both sides nonempty).
struct Block {
  std::vector<int> c1, c2;

  bool operator==(const Block& other) const = default;
  bool contains(const Block& other) const;
  bool strictly_contains(const Block& other) const;
  int size() const { return static_cast<int>(c1.size() + c2.size()); }
};

Block full_block(const Game& game);

// All count vectors of length m summing to k (the size-k sample lattice on
// the simplex), in the fixed enumeration order of for_each_count_vector.
// Cardinality C(k+m-1, m-1); throws when that exceeds `cap`.
std::vector<Eigen::VectorXi> simplex_grid(int m, int k,
                                          std::int64_t cap = kDefaultGridCap);

//! Smallest block containing `seed` that is closed under best replies to
//! every size-k sample supported on it: grow by adding all best replies to
//! all lattice points of the current block until a fixed point. Monotone in
//! the seed and idempotent. Best replies are set-valued; payoff comparisons
//! are exact 64-bit integer arithmetic when all payoffs are integers,
//! otherwise the kTieTolerance band.
Block k_best_reply_closure(const Game& game, const Block& seed, int k,
                           std::int64_t cap = kDefaultGridCap);

//! All minimal closed blocks: blocks equal to their own closure containing
//! no strictly smaller such block. Requires m1 + m2 <= max_total_strategies.
std::vector<Block> minimal_k_curb_blocks(const Game& game, int k,
                                         std::int64_t cap = kDefaultGridCap,
                                         int max_total_strategies = 12);

// True iff each role's frequency vector puts mass >= 1 - delta on its side
// of the block (p1 against c1, p2 against c2). Requires delta in [0,1].
bool in_neighborhood(const StatePoint& state, const Block& block, double delta);

// Report document: the k used and each minimal block's 1-based strategy
// indices.
nlohmann::json curb_report(const Game& game, int k,
                           const std::vector<Block>& blocks);

}  // namespace rws
