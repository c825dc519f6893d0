#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "posgame/core.hpp"
#include "posgame/equilibrium.hpp"

// Independent numerical check of the closed forms. The cost functional
//   Cost_i = int_0^1 (m' + kappa m) lambda_i a_i' dt
// is discretized on a uniform grid with forward differences for the rates and
// interval-midpoint averages for m. With that choice the kappa lambda_i^2 a a'
// term telescopes, so each trader's cost is a strictly convex quadratic in its
// interior samples with the discrete Laplacian as Hessian.

namespace posgame {

/// Thomas algorithm for a tridiagonal system. sub[0] and sup[n-1] are ignored.
template <class Real>
std::vector<Real> solve_tridiagonal(std::span<const Real> sub, std::span<const Real> diag,
                                    std::span<const Real> sup, std::span<const Real> rhs) {
  const std::size_t n = diag.size();
  if (sub.size() != n || sup.size() != n || rhs.size() != n)
    throw error(errc::grid_mismatch, "tridiagonal bands must share one length");
  if (n == 0) return {};
  std::vector<Real> c(n), x(n);
  Real pivot = diag[0];
  if (std::abs(pivot) < std::numeric_limits<Real>::min()) throw error(errc::singular_system, "zero pivot at row 0");
  c[0] = sup[0] / pivot;
  x[0] = rhs[0] / pivot;
  for (std::size_t k = 1; k < n; ++k) {
    pivot = diag[k] - sub[k] * c[k - 1];
    if (std::abs(pivot) < std::numeric_limits<Real>::min())
      throw error(errc::singular_system, "zero pivot at row " + std::to_string(k));
    c[k] = sup[k] / pivot;
    x[k] = (rhs[k] - sub[k] * x[k - 1]) / pivot;
  }
  for (std::size_t k = n - 1; k-- > 0;) x[k] -= c[k] * x[k + 1];
  return x;
}

/// Composite Simpson rule; intervals is rounded up to an even count.
template <class F>
double simpson(F&& f, double a, double b, std::size_t intervals) {
  if (intervals < 2) intervals = 2;
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double odd = 0.0, even = 0.0;
  for (std::size_t k = 1; k < intervals; ++k) {
    const double v = f(a + h * static_cast<double>(k));
    (k % 2 ? odd : even) += v;
  }
  return h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}

/// Simpson integral of (m' + kappa m) lambda_i a_i' using the closed-form
/// strategies and their analytic rates, m = sum_j lambda_j a_j.
inline double integrated_trader_cost(const EquilibriumSolution& sol, std::size_t i, std::size_t intervals = 10000) {
  const auto& s = sol.strategies.at(i);
  const double kappa = sol.spec.kappa;
  return simpson(
      [&](double t) { return (sol.weighted_rate(t) + kappa * sol.weighted_sum(t)) * s.lambda * s.rate(t); }, 0.0,
      1.0, intervals);
}

/// Paths of all traders on one shared uniform grid.
struct DiscreteGame {
  GameSpec spec;
  std::size_t n_steps = 0;
  std::vector<SampledPath> paths;

  double step() const noexcept { return 1.0 / static_cast<double>(n_steps); }

  /// m = sum_j lambda_j a_j at every grid point.
  std::vector<double> market() const {
    std::vector<double> m(n_steps + 1, 0.0);
    for (std::size_t j = 0; j < paths.size(); ++j)
      for (std::size_t k = 0; k <= n_steps; ++k) m[k] += spec.lambdas[j] * paths[j].values[k];
    return m;
  }
};

inline constexpr double kEndpointTolerance = 1e-9;

inline void validate_game(const DiscreteGame& game) {
  validate_spec(game.spec);
  if (game.n_steps < 1) throw error(errc::grid_too_small, "n_steps must be positive");
  if (game.paths.size() != game.spec.n)
    throw error(errc::grid_mismatch, "expected one path per trader");
  const auto reference = uniform_grid(game.n_steps + 1);
  for (std::size_t j = 0; j < game.paths.size(); ++j) {
    const auto& p = game.paths[j];
    if (p.grid.size() != game.n_steps + 1 || p.values.size() != game.n_steps + 1)
      throw error(errc::grid_mismatch, "path " + std::to_string(j + 1) + " has the wrong length");
    for (std::size_t k = 0; k <= game.n_steps; ++k)
      if (std::abs(p.grid[k] - reference[k]) > 1e-14)
        throw error(errc::grid_mismatch, "path " + std::to_string(j + 1) + " is not on the shared grid");
    if (std::abs(p.values.front()) > kEndpointTolerance || std::abs(p.values.back() - 1.0) > kEndpointTolerance)
      throw error(errc::grid_mismatch, "path " + std::to_string(j + 1) + " endpoints are not pinned to 0 and 1");
  }
}

inline DiscreteGame straight_line_game(const GameSpec& spec, std::size_t n_steps) {
  validate_spec(spec);
  const auto grid = uniform_grid(n_steps + 1);
  DiscreteGame game{spec, n_steps, std::vector<SampledPath>(spec.n, SampledPath{grid, grid})};
  return game;
}

inline DiscreteGame closed_form_game(const EquilibriumSolution& sol, std::size_t n_steps) {
  DiscreteGame game{sol.spec, n_steps, {}};
  for (const auto& s : sol.strategies) game.paths.push_back(sample_strategy(s, n_steps + 1));
  return game;
}

/// Discretized implementation cost of trader i.
inline double discrete_cost(const DiscreteGame& game, std::size_t i) {
  validate_game(game);
  const auto m = game.market();
  const auto& a = game.paths.at(i).values;
  const double h = game.step();
  const double kappa = game.spec.kappa;
  double cost = 0.0;
  for (std::size_t k = 0; k < game.n_steps; ++k) {
    const double dm = m[k + 1] - m[k];
    const double mid = 0.5 * (m[k] + m[k + 1]);
    cost += (dm / h + kappa * mid) * game.spec.lambdas[i] * (a[k + 1] - a[k]);
  }
  return cost;
}

namespace detail {

/// Best response of trader i given the others' weighted sum o = sum_{j != i} lambda_j a_j.
/// First-order conditions at interior node j:
///   -a_{j-1} + 2 a_j - a_{j+1} = h (g_j - g_{j-1}) / (2 lambda_i),
///   g_k = (o_{k+1} - o_k) / h + kappa (o_k + o_{k+1}) / 2.
inline std::vector<double> best_response_values(std::span<const double> others, double lambda, double kappa,
                                                std::size_t n_steps) {
  const double h = 1.0 / static_cast<double>(n_steps);
  std::vector<double> out(n_steps + 1, 0.0);
  out[n_steps] = 1.0;
  if (n_steps < 2) return out;

  const std::size_t interior = n_steps - 1;
  std::vector<double> g(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k)
    g[k] = (others[k + 1] - others[k]) / h + kappa * 0.5 * (others[k] + others[k + 1]);

  std::vector<double> sub(interior, -1.0), diag(interior, 2.0), sup(interior, -1.0), rhs(interior);
  const double scale = h / (2.0 * lambda);
  for (std::size_t j = 1; j <= interior; ++j) rhs[j - 1] = scale * (g[j] - g[j - 1]);
  rhs[interior - 1] += 1.0;  // a(1) = 1; a(0) = 0 adds nothing

  const auto x = solve_tridiagonal<double>(sub, diag, sup, rhs);
  std::copy(x.begin(), x.end(), out.begin() + 1);
  return out;
}

inline std::vector<double> others_sum(const DiscreteGame& game, std::size_t i) {
  std::vector<double> o(game.n_steps + 1, 0.0);
  for (std::size_t j = 0; j < game.paths.size(); ++j) {
    if (j == i) continue;
    for (std::size_t k = 0; k <= game.n_steps; ++k) o[k] += game.spec.lambdas[j] * game.paths[j].values[k];
  }
  return o;
}

}  // namespace detail

/// Minimizer of discrete_cost(., i) over trader i's interior samples with
/// every other path held fixed.
inline SampledPath best_response(const DiscreteGame& game, std::size_t i) {
  validate_game(game);
  const auto o = detail::others_sum(game, i);
  return SampledPath{game.paths.at(i).grid,
                     detail::best_response_values(o, game.spec.lambdas[i], game.spec.kappa, game.n_steps)};
}

struct FixedPointResult {
  DiscreteGame game;
  std::size_t sweeps = 0;     // total, including restarts
  double relaxation = 1.0;    // step size in use at convergence
  double residual = 0.0;      // max_i sup|BR_i - a_i| on the last sweep
};

inline constexpr double kMinRelaxation = 1.0 / 1024.0;

/// Cyclic best-response iteration from straight-line paths.
///
/// Each sweep moves trader i to a_i + w (BR_i - a_i) in turn. w starts at 1
/// and halves, restarting from straight lines, whenever the residual climbs
/// above ten times its best value so far. Stops once the sup-norm
/// best-response residual of a full sweep is below tol.
inline FixedPointResult nash_fixed_point(const GameSpec& spec, std::size_t n_steps, double tol = 1e-8,
                                         std::size_t max_iters = 10000) {
  validate_spec(spec);
  if (n_steps < 2) throw error(errc::grid_too_small, "n_steps must be at least 2");

  FixedPointResult result{straight_line_game(spec, n_steps), 0, 1.0, 0.0};
  auto& game = result.game;
  double best = std::numeric_limits<double>::infinity();
  double w = 1.0;

  while (result.sweeps < max_iters) {
    ++result.sweeps;
    double residual = 0.0;
    for (std::size_t i = 0; i < spec.n; ++i) {
      const auto o = detail::others_sum(game, i);
      const auto br = detail::best_response_values(o, spec.lambdas[i], spec.kappa, n_steps);
      auto& a = game.paths[i].values;
      for (std::size_t k = 0; k <= n_steps; ++k) {
        const double diff = br[k] - a[k];
        residual = std::max(residual, std::abs(diff));
        a[k] += w * diff;
      }
    }
    result.residual = residual;
    result.relaxation = w;
    if (residual < tol) return result;

    if (!std::isfinite(residual) || residual > 10.0 * best) {
      w *= 0.5;
      if (w < kMinRelaxation) break;
      game = straight_line_game(spec, n_steps);
      best = std::numeric_limits<double>::infinity();
      continue;
    }
    best = std::min(best, residual);
  }
  throw error(errc::no_convergence, "no fixed point after " + std::to_string(result.sweeps) +
                                        " sweeps (max_iters=" + std::to_string(max_iters) +
                                        ", last residual " + std::to_string(result.residual) +
                                        ", relaxation " + std::to_string(w) + ")");
}

/// Largest pointwise gap between the game's paths and the closed forms on the same grid.
inline double sup_gap(const DiscreteGame& game, const EquilibriumSolution& sol) {
  double gap = 0.0;
  for (std::size_t j = 0; j < game.paths.size(); ++j) {
    const auto& p = game.paths[j];
    for (std::size_t k = 0; k < p.size(); ++k)
      gap = std::max(gap, std::abs(p.values[k] - sol.strategies.at(j).value(p.grid[k])));
  }
  return gap;
}

/// Change in trader i's discrete cost when its closed-form path is moved by
/// eps * bump while everyone else stays on the closed form.
inline double deviation_test(const EquilibriumSolution& sol, std::size_t i, const SampledPath& bump, double eps) {
  if (bump.size() < 2 || bump.values.size() != bump.size())
    throw error(errc::grid_too_small, "bump needs at least 2 samples");
  if (std::abs(bump.values.front()) > 1e-12 || std::abs(bump.values.back()) > 1e-12)
    throw error(errc::bad_bump, "bump must vanish at both endpoints");
  auto game = closed_form_game(sol, bump.n_steps());
  const double base = discrete_cost(game, i);
  auto& a = game.paths.at(i).values;
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += eps * bump.values[k];
  return discrete_cost(game, i) - base;
}

inline double deviation_test(const GameSpec& spec, std::size_t i, const SampledPath& bump, double eps) {
  return deviation_test(solve(spec), i, bump, eps);
}

/// sin(k pi t) sampled with exact zeros at the endpoints.
inline SampledPath sine_bump(std::size_t n_steps, int mode) {
  SampledPath b{uniform_grid(n_steps + 1), {}};
  b.values.resize(b.grid.size());
  for (std::size_t k = 0; k < b.grid.size(); ++k) b.values[k] = std::sin(mode * std::numbers::pi * b.grid[k]);
  b.values.front() = 0.0;
  b.values.back() = 0.0;
  return b;
}

/// Uniform(-1, 1) interior samples, zero endpoints.
inline SampledPath random_bump(std::size_t n_steps, std::mt19937_64& rng) {
  SampledPath b{uniform_grid(n_steps + 1), {}};
  b.values.assign(b.grid.size(), 0.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t k = 1; k + 1 < b.values.size(); ++k) b.values[k] = u(rng);
  return b;
}

}  // namespace posgame
