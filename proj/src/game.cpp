#include "rws/game.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rws {

namespace {

bool is_integral_value(double x) {
  return std::isfinite(x) && std::floor(x) == x && std::abs(x) < 0x1p40;
}

}  // namespace

bool Game::has_integer_payoffs() const {
  for (const auto* m : {&payoff1, &payoff2}) {
    for (Eigen::Index i = 0; i < m->size(); ++i) {
      if (!is_integral_value((*m)(i))) return false;
    }
  }
  return true;
}

void Game::validate() const {
  if (payoff1.rows() < 2 || payoff1.cols() < 2) {
    throw std::invalid_argument("game '" + name +
                                "': needs at least 2 strategies per role");
  }
  if (payoff1.rows() != payoff2.rows() || payoff1.cols() != payoff2.cols()) {
    std::ostringstream os;
    os << "game '" << name << "': payoff matrices disagree in shape ("
       << payoff1.rows() << "x" << payoff1.cols() << " vs " << payoff2.rows()
       << "x" << payoff2.cols() << ")";
    throw std::invalid_argument(os.str());
  }
  if (!payoff1.allFinite() || !payoff2.allFinite()) {
    throw std::invalid_argument("game '" + name + "': non-finite payoff entry");
  }
}

void validate_distribution(const Eigen::VectorXd& v, const char* what) {
  if (v.size() == 0) {
    throw std::invalid_argument(std::string(what) + ": empty vector");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) >= -kSimplexTolerance)) {
      throw std::invalid_argument(std::string(what) +
                                  ": negative component " + std::to_string(v(i)));
    }
  }
  if (std::abs(v.sum() - 1.0) > kSimplexTolerance) {
    throw std::invalid_argument(std::string(what) + ": components sum to " +
                                std::to_string(v.sum()) + ", expected 1");
  }
}

void StatePoint::validate() const {
  validate_distribution(p1, "StatePoint.p1");
  validate_distribution(p2, "StatePoint.p2");
}

StatePoint corner_state(const Game& game, int s1, int s2) {
  if (s1 < 0 || s1 >= game.m1() || s2 < 0 || s2 >= game.m2()) {
    throw std::invalid_argument("corner_state: strategy index out of range");
  }
  StatePoint x;
  x.p1 = Eigen::VectorXd::Zero(game.m1());
  x.p2 = Eigen::VectorXd::Zero(game.m2());
  x.p1(s1) = 1.0;
  x.p2(s2) = 1.0;
  return x;
}

StatePoint uniform_state(const Game& game) {
  StatePoint x;
  x.p1 = Eigen::VectorXd::Constant(game.m1(), 1.0 / game.m1());
  x.p2 = Eigen::VectorXd::Constant(game.m2(), 1.0 / game.m2());
  return x;
}

// ---------------------------------------------------------------------------
// Bundled games
// ---------------------------------------------------------------------------

namespace {

Game make_game(std::string name, std::initializer_list<double> a,
               std::initializer_list<double> b, int rows, int cols) {
  Game g;
  g.name = std::move(name);
  g.payoff1.resize(rows, cols);
  g.payoff2.resize(rows, cols);
  int i = 0;
  for (double v : a) g.payoff1(i / cols, i % cols) = v, ++i;
  i = 0;
  for (double v : b) g.payoff2(i / cols, i % cols) = v, ++i;
  return g;
}

}  // namespace

Game matching_pennies() {
  return make_game("matching-pennies", {1, -1, -1, 1}, {-1, 1, 1, -1}, 2, 2);
}

Game unstable_rps() {
  return make_game("unstable-rps",
                   {0, -3, 1,
                    1, 0, -2,
                    -3, 1, 0},
                   {0, 1, -3,
                    -3, 0, 1,
                    1, -2, 0},
                   3, 3);
}

Game three_by_two_example() {
  return make_game("three-by-two-example",
                   {2, -100,
                    -100, 2,
                    1, 1},
                   {-100, 2,
                    2, -100,
                    0, 0},
                   3, 2);
}

Game coordination_game() {
  return make_game("coordination", {2, 0, 0, 1}, {2, 0, 0, 1}, 2, 2);
}

Game game_from_json(const nlohmann::json& doc) {
  for (const char* field : {"m1", "m2", "payoff1", "payoff2"}) {
    if (!doc.contains(field)) {
      throw std::invalid_argument(std::string("game document: missing field '") +
                                  field + "'");
    }
  }
  Game g;
  g.name = doc.value("name", "unnamed");
  const int m1 = doc.at("m1").get<int>();
  const int m2 = doc.at("m2").get<int>();
  if (m1 < 2 || m2 < 2) {
    throw std::invalid_argument("game document: m1 and m2 must be >= 2");
  }
  auto read_matrix = [&](const char* field) {
    const auto& arr = doc.at(field);
    if (!arr.is_array() || static_cast<int>(arr.size()) != m1 * m2) {
      std::ostringstream os;
      os << "game document: '" << field << "' must be a flat row-major array of "
         << m1 * m2 << " numbers, got " << arr.size();
      throw std::invalid_argument(os.str());
    }
    Eigen::MatrixXd m(m1, m2);
    for (int i = 0; i < m1 * m2; ++i) {
      m(i / m2, i % m2) = arr.at(i).get<double>();
    }
    return m;
  };
  g.payoff1 = read_matrix("payoff1");
  g.payoff2 = read_matrix("payoff2");
  g.validate();
  return g;
}

nlohmann::json game_to_json(const Game& game) {
  nlohmann::json doc;
  doc["name"] = game.name;
  doc["m1"] = game.m1();
  doc["m2"] = game.m2();
  auto flatten = [](const Eigen::MatrixXd& m) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double v = m(r, c);
        if (is_integral_value(v)) {
          arr.push_back(static_cast<std::int64_t>(v));
        } else {
          arr.push_back(v);
        }
      }
    }
    return arr;
  };
  doc["payoff1"] = flatten(game.payoff1);
  doc["payoff2"] = flatten(game.payoff2);
  return doc;
}

Game load_game(const std::string& name_or_path) {
  if (name_or_path == "matching-pennies") return matching_pennies();
  if (name_or_path == "unstable-rps") return unstable_rps();
  if (name_or_path == "three-by-two-example") return three_by_two_example();
  if (name_or_path == "coordination") return coordination_game();

  std::ifstream in(name_or_path);
  if (!in) {
    throw std::invalid_argument("unknown built-in game and unreadable path: '" +
                                name_or_path + "'");
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("game file '" + name_or_path +
                                "': " + e.what());
  }
  return game_from_json(doc);
}

// ---------------------------------------------------------------------------
// Best replies
// ---------------------------------------------------------------------------

Eigen::VectorXd expected_payoffs(const Game& game, int role,
                                 const Eigen::VectorXd& opp_weights) {
  if (role != 0 && role != 1) {
    throw std::invalid_argument("expected_payoffs: role must be 0 or 1");
  }
  if (opp_weights.size() != game.num_strategies(1 - role)) {
    throw std::invalid_argument("expected_payoffs: opponent vector length "
                                "does not match the game");
  }
  if (role == 0) return game.payoff1 * opp_weights;
  return game.payoff2.transpose() * opp_weights;
}

std::vector<int> best_reply_set(const Game& game, int role,
                                const Eigen::VectorXd& opp_weights) {
  const Eigen::VectorXd u = expected_payoffs(game, role, opp_weights);
  const double umax = u.maxCoeff();
  const double band = kTieTolerance * std::max(1.0, std::abs(umax));
  std::vector<int> out;
  for (Eigen::Index a = 0; a < u.size(); ++a) {
    if (u(a) >= umax - band) out.push_back(static_cast<int>(a));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Support-enumeration Nash solver
// ---------------------------------------------------------------------------

namespace {

// All subsets of {0..m-1} with exactly `size` elements, ascending.
void enumerate_supports(int m, int size, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  auto rec = [&](auto&& self, int next) -> void {
    if (static_cast<int>(cur.size()) == size) {
      out.push_back(cur);
      return;
    }
    for (int i = next; i < m; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
}

// Mixture of `role`'s opponent over `opp_support` making `role` indifferent
// across `own_support`. Returns empty on a singular system or a solution
// with a meaningfully negative weight.
Eigen::VectorXd solve_indifference(const Game& game, int role,
                                   const std::vector<int>& own_support,
                                   const std::vector<int>& opp_support,
                                   bool& singular) {
  const int t = static_cast<int>(own_support.size());
  singular = false;
  Eigen::MatrixXd payoff =
      role == 0 ? game.payoff1 : Eigen::MatrixXd(game.payoff2.transpose());
  Eigen::MatrixXd sys(t, t);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(t);
  for (int r = 0; r + 1 < t; ++r) {
    for (int c = 0; c < t; ++c) {
      sys(r, c) = payoff(own_support[r], opp_support[c]) -
                  payoff(own_support[r + 1], opp_support[c]);
    }
  }
  sys.row(t - 1).setOnes();
  rhs(t - 1) = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) {
    singular = true;
    return {};
  }
  Eigen::VectorXd w = lu.solve(rhs);
  for (int i = 0; i < t; ++i) {
    if (w(i) < -1e-9) return {};
    w(i) = std::max(w(i), 0.0);
  }
  w /= w.sum();
  return w;
}

bool is_equilibrium(const Game& game, const Eigen::VectorXd& s1,
                    const Eigen::VectorXd& s2) {
  const Eigen::VectorXd u1 = expected_payoffs(game, 0, s2);
  const Eigen::VectorXd u2 = expected_payoffs(game, 1, s1);
  const double v1 = u1.dot(s1);
  const double v2 = u2.dot(s2);
  return u1.maxCoeff() - v1 <= kTieTolerance * std::max(1.0, std::abs(v1)) &&
         u2.maxCoeff() - v2 <= kTieTolerance * std::max(1.0, std::abs(v2));
}

}  // namespace

NashResult solve_nash_small(const Game& game) {
  game.validate();
  if (game.m1() > 4 || game.m2() > 4) {
    throw std::invalid_argument(
        "solve_nash_small: support enumeration is limited to games up to 4x4");
  }
  NashResult result;
  const int max_size = std::min(game.m1(), game.m2());
  for (int size = 1; size <= max_size; ++size) {
    std::vector<std::vector<int>> sup1, sup2;
    enumerate_supports(game.m1(), size, sup1);
    enumerate_supports(game.m2(), size, sup2);
    for (const auto& t1 : sup1) {
      for (const auto& t2 : sup2) {
        Eigen::VectorXd w1, w2;
        if (size == 1) {
          w1 = Eigen::VectorXd::Ones(1);
          w2 = Eigen::VectorXd::Ones(1);
        } else {
          bool singular1 = false, singular2 = false;
          w2 = solve_indifference(game, 0, t1, t2, singular1);
          w1 = solve_indifference(game, 1, t2, t1, singular2);
          if (singular1 || singular2) {
            std::ostringstream os;
            os << "degenerate game: singular indifference system for supports "
               << "{";
            for (int s : t1) os << s + 1 << " ";
            os << "}x{";
            for (int s : t2) os << s + 1 << " ";
            os << "}";
            result.warnings.push_back(os.str());
            continue;
          }
          if (w1.size() == 0 || w2.size() == 0) continue;
        }
        Eigen::VectorXd s1 = Eigen::VectorXd::Zero(game.m1());
        Eigen::VectorXd s2 = Eigen::VectorXd::Zero(game.m2());
        for (int i = 0; i < size; ++i) {
          s1(t1[i]) = w1(i);
          s2(t2[i]) = w2(i);
        }
        if (!is_equilibrium(game, s1, s2)) continue;
        bool duplicate = false;
        for (const auto& eq : result.equilibria) {
          if ((eq.s1 - s1).lpNorm<Eigen::Infinity>() < 1e-9 &&
              (eq.s2 - s2).lpNorm<Eigen::Infinity>() < 1e-9) {
            duplicate = true;
            break;
          }
        }
        if (!duplicate) result.equilibria.push_back({s1, s2});
      }
    }
  }
  return result;
}

}  // namespace rws
