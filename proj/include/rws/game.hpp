#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rws {

// Relative indifference band for payoff comparisons. Strategies whose
// expected payoff is within this band of the maximum count as best replies.
inline constexpr double kTieTolerance = 1e-9;

// Component tolerance for probability-vector invariants (nonnegative,
// unit sum).
inline constexpr double kSimplexTolerance = 1e-12;

//! A finite two-player game in normal form. payoff1(a, b) / payoff2(a, b)
//! are the row / column player's payoffs when row plays a and column plays b.
struct Game {
  std::string name;
  Eigen::MatrixXd payoff1;  // m1 x m2
  Eigen::MatrixXd payoff2;  // m1 x m2

  int m1() const { return static_cast<int>(payoff1.rows()); }
  int m2() const { return static_cast<int>(payoff1.cols()); }
  // Strategy count of `role` (0 = row, 1 = column).
  int num_strategies(int role) const { return role == 0 ? m1() : m2(); }

  // True when every payoff entry is an integer representable in 64 bits;
  // enables exact best-reply arithmetic in the closure computations.
  bool has_integer_payoffs() const;

  // Throws std::invalid_argument unless m1, m2 >= 2, dimensions agree and
  // all entries are finite.
  void validate() const;
};

//! The Markov state of the learning process: each role's recency-weighted
//! frequency vector over its own past plays. Role 0 samples p2, role 1
//! samples p1.
struct StatePoint {
  Eigen::VectorXd p1;  // length m1
  Eigen::VectorXd p2;  // length m2

  const Eigen::VectorXd& of_role(int role) const { return role == 0 ? p1 : p2; }
  Eigen::VectorXd& of_role(int role) { return role == 0 ? p1 : p2; }

  void validate() const;  // simplex invariants, within kSimplexTolerance
};

// Throws unless v is a probability vector within kSimplexTolerance.
void validate_distribution(const Eigen::VectorXd& v, const char* what);

// Both roles' frequencies at the pure profile (s1, s2); 0-based indices.
StatePoint corner_state(const Game& game, int s1, int s2);
StatePoint uniform_state(const Game& game);

// ---------------------------------------------------------------------------
// Bundled games and game files
// ---------------------------------------------------------------------------

Game matching_pennies();
Game unstable_rps();
Game three_by_two_example();
Game coordination_game();

// Resolves a built-in name ("matching-pennies", "unstable-rps",
// "three-by-two-example", "coordination") or loads a JSON game file with
// fields name, m1, m2, payoff1, payoff2 (row-major). Throws on unknown
// names, malformed documents, dimension mismatches or non-finite entries.
Game load_game(const std::string& name_or_path);

Game game_from_json(const nlohmann::json& doc);
nlohmann::json game_to_json(const Game& game);

// ---------------------------------------------------------------------------
// Best replies and small-game Nash equilibria
// ---------------------------------------------------------------------------

// Expected payoff of each pure strategy of `role` against an opponent
// weight vector (any nonnegative scaling of a mixed strategy).
Eigen::VectorXd expected_payoffs(const Game& game, int role,
                                 const Eigen::VectorXd& opp_weights);

// Set of best replies (0-based, ascending) of `role` against an opponent
// weight vector (a mixture or unnormalized sample counts); ties resolved
// within kTieTolerance relative to the maximum. Never empty. Invariant
// under positive affine payoff transformations.
std::vector<int> best_reply_set(const Game& game, int role,
                                const Eigen::VectorXd& opp_weights);

struct NashEquilibrium {
  Eigen::VectorXd s1, s2;
};

struct NashResult {
  std::vector<NashEquilibrium> equilibria;
  std::vector<std::string> warnings;  // singular support systems, etc.
};

//! All Nash equilibria of a game with m1, m2 <= 4, by support enumeration:
//! equal-cardinality support pairs, indifference linear systems, then a
//! verification pass (no profitable pure deviation within kTieTolerance).
//! Degenerate support systems are skipped with a warning.
NashResult solve_nash_small(const Game& game);

}  // namespace rws
