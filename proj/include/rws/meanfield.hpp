#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rws/engine.hpp"
#include "rws/game.hpp"

namespace rws {

//! Path of the deterministic mean-value process x' = E[play | x] - x,
//! integrated with classical RK4 on a uniform time grid.
struct MeanPath {
  std::vector<double> times;
  std::vector<StatePoint> points;
  RwsParams params;
  double dt = 0.0;
  double max_renorm_drift = 0.0;  // largest per-step simplex correction
};

// Velocity (F1, F2) at x: per role, the exact expected play vector minus the
// state; each role's components sum to zero.
std::pair<Eigen::VectorXd, Eigen::VectorXd> vector_field(
    const Game& game, const RwsParams& params, const StatePoint& x,
    std::int64_t grid_cap = kDefaultGridCap);

double vector_field_sup_norm(const Game& game, const RwsParams& params,
                             const StatePoint& x,
                             std::int64_t grid_cap = kDefaultGridCap);

// RK4 path over [0, horizon]; every point is renormalized onto the simplex
// (negatives clipped, rescaled) and the renormalization drift must stay
// below 1e-8 per step, otherwise a step-size error is raised.
MeanPath integrate_meanfield(const Game& game, const RwsParams& params,
                             const StatePoint& x0, double horizon, double dt,
                             std::int64_t grid_cap = kDefaultGridCap);

//! Tremble-adjusted upper binomial tail
//!   rho(x) = (1-eps) * P(Binomial(k, x) > M) + eps/2,
//! the probability that a role with cut-off M plays its high strategy when
//! the opponent frequency is x. Strictly increasing on (0,1) for M < k,
//! with rho(0) = eps/2 and rho(1) = 1 - eps/2.
double rho(int k, int cutoff, double epsilon, double x);

struct FixedPointResult {
  StatePoint x_star;
  double residual = 0.0;  // ||F(x*)||_inf from vector_field
  std::string method;
  bool converged = false;
  std::optional<StatePoint> nash_reference;
};

// The cut-off construction of fixed_point_2x2 requires x_hat * k to be
// non-integer; violations raise this rather than a generic argument error
// so callers can distinguish them from structural preconditions.
struct IntegerCutoffError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

//! Fixed point of the mean-value process for a 2x2 game with a unique
//! completely mixed Nash equilibrium (x1_hat, x2_hat). Roles are oriented
//! as agreeing/disagreeing from the pure best-reply pattern, cut-offs are
//! M_i = floor(x_i_hat * k), and the strictly decreasing composition
//! rho_a(rho_d(.)) is bisected on [eps/2, 1-eps/2]. Fails when x_i_hat * k
//! is an integer (within 1e-9), as the cut-off construction then breaks.
FixedPointResult fixed_point_2x2(const Game& game, const RwsParams& params);

//! Damped iteration x <- (1-alpha) x + alpha E[play | x] with alpha = 1/2,
//! falling back to long-horizon integration; converged means
//! ||F(x)||_inf < 1e-10. Makes no uniqueness claim.
FixedPointResult fixed_point_general(const Game& game, const RwsParams& params,
                                     const StatePoint& x0,
                                     std::int64_t grid_cap = kDefaultGridCap);

//! Lyapunov diagnostic V(t) = 0.5 * ||x(t) - x*||_2^2 along a mean path.
struct LyapunovCheck {
  std::vector<double> v;
  double max_increment = 0.0;  // largest positive V step
};

LyapunovCheck lyapunov_check(const MeanPath& path, const StatePoint& x_star);

}  // namespace rws
