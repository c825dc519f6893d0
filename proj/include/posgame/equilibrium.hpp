#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "posgame/core.hpp"

namespace posgame {

inline Alpha compute_alpha(std::size_t n, double kappa) {
  const auto nd = static_cast<double>(n);
  return Alpha{kappa * (nd - 1.0) / (nd + 1.0)};
}

/// Limiting value of alpha as n grows without bound.
inline Alpha compute_alpha_infinite(double kappa) { return Alpha{kappa}; }

/// Closed-form Nash equilibrium for n >= 2 traders and kappa > 0.
///
/// Coefficients are accurate in double precision for lambda_i >= 1e-6; both
/// grow like 1/lambda_i below that.
inline EquilibriumSolution solve_equilibrium(const GameSpec& spec) {
  validate_spec(spec);
  const Alpha alpha = compute_alpha(spec.n, spec.kappa);
  if (alpha.degenerate())
    throw error(errc::degenerate_alpha,
                "alpha = 0 (n=" + std::to_string(spec.n) + ", kappa=" + std::to_string(spec.kappa) +
                    "); use solve_equilibrium_limit");

  const auto n = static_cast<double>(spec.n);
  const double kappa = spec.kappa;
  // e^kappa - 1 and 1 - e^{-alpha}
  const double grow = std::expm1(kappa);
  const double settle = -std::expm1(-alpha.value);

  EquilibriumSolution sol{spec, {}, MarketStrategy{alpha.value}, alpha};
  sol.strategies.reserve(spec.n);
  for (double lambda : spec.lambdas) {
    const double ln = lambda * n;
    ClosedFormStrategy s;
    s.b = (ln - 1.0) / (ln * grow);
    s.d = 1.0 / (ln * settle);
    s.kappa = kappa;
    s.alpha = alpha.value;
    s.lambda = lambda;
    sol.strategies.push_back(s);
  }
  return sol;
}

/// kappa = 0 or a single trader: every unit strategy and the market are a(t) = t.
inline EquilibriumSolution solve_equilibrium_limit(const GameSpec& spec) {
  validate_spec(spec);
  EquilibriumSolution sol{spec, {}, MarketStrategy{0.0}, Alpha{0.0}};
  sol.strategies.reserve(spec.n);
  for (double lambda : spec.lambdas) {
    ClosedFormStrategy s;
    s.kappa = spec.kappa;
    s.lambda = lambda;
    s.linear = 1.0;
    sol.strategies.push_back(s);
  }
  return sol;
}

/// Dispatches to the generic or the limit branch.
inline EquilibriumSolution solve(const GameSpec& spec) {
  validate_spec(spec);
  if (compute_alpha(spec.n, spec.kappa).degenerate()) return solve_equilibrium_limit(spec);
  return solve_equilibrium(spec);
}

template <class Path>
SampledPath sample_path(const Path& path, std::size_t n_points) {
  SampledPath out{uniform_grid(n_points), {}};
  out.values.resize(n_points);
  for (std::size_t k = 0; k < n_points; ++k) out.values[k] = path.value(out.grid[k]);
  return out;
}

inline SampledPath sample_strategy(const ClosedFormStrategy& strategy, std::size_t n_points) {
  return sample_path(strategy, n_points);
}

inline SampledPath sample_market(const EquilibriumSolution& sol, std::size_t n_points) {
  return sample_path(sol.market, n_points);
}

/// Residuals of the three governing equations at time t.
struct OdeResiduals {
  double trader;        // a'' - kappa a' + (m'' + kappa m') / lambda_i
  double market_kappa;  // m'' + kappa m' - 2 kappa m' / (n + 1)
  double market_alpha;  // m'' + alpha m'
};

/// a_i'' - kappa a_i' + (2 kappa / (n + 1)) m' / lambda_i, with m = sum lambda_j a_j
/// and analytic derivatives throughout. Zero for an equilibrium.
inline double ode_residual(const EquilibriumSolution& sol, std::size_t i, double t) {
  const auto& s = sol.strategies.at(i);
  const double kappa = sol.spec.kappa;
  const auto n = static_cast<double>(sol.spec.n);
  return s.accel(t) - kappa * s.rate(t) + (2.0 * kappa / (n + 1.0)) * sol.weighted_rate(t) / s.lambda;
}

inline OdeResiduals ode_residuals(const EquilibriumSolution& sol, std::size_t i, double t) {
  const auto& s = sol.strategies.at(i);
  const double kappa = sol.spec.kappa;
  const auto n = static_cast<double>(sol.spec.n);
  const double m1 = sol.weighted_rate(t);
  const double m2 = sol.weighted_accel(t);
  return OdeResiduals{
      s.accel(t) - kappa * s.rate(t) + (m2 + kappa * m1) / s.lambda,
      m2 + kappa * m1 - 2.0 * kappa / (n + 1.0) * m1,
      m2 + sol.alpha.value * m1,
  };
}

}  // namespace posgame
