#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace posgame {

enum class errc {
  empty_game,
  non_positive_lambda,
  lambda_sum_mismatch,
  negative_kappa,
  degenerate_alpha,
  grid_too_small,
  grid_mismatch,
  singular_system,
  no_convergence,
  bad_bump,
  representation_too_small,
  invalid_scenario,
  config,
};

inline const char* to_string(errc code) {
  switch (code) {
    case errc::empty_game: return "EmptyGame";
    case errc::non_positive_lambda: return "NonPositiveLambda";
    case errc::lambda_sum_mismatch: return "LambdaSumMismatch";
    case errc::negative_kappa: return "NegativeKappa";
    case errc::degenerate_alpha: return "DegenerateAlpha";
    case errc::grid_too_small: return "GridTooSmall";
    case errc::grid_mismatch: return "GridMismatch";
    case errc::singular_system: return "SingularSystem";
    case errc::no_convergence: return "NoConvergence";
    case errc::bad_bump: return "BadBump";
    case errc::representation_too_small: return "RepresentationTooSmall";
    case errc::invalid_scenario: return "InvalidScenario";
    case errc::config: return "ConfigError";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

inline constexpr double kLambdaSumTolerance = 1e-12;

/// One instance of the position-building game: n traders with fractional
/// target quantities summing to one, and the permanent-impact parameter kappa.
/// Build through make_game() or validate_spec(); both enforce the invariants.
struct GameSpec {
  std::size_t n = 0;
  std::vector<double> lambdas;
  double kappa = 0.0;
};

inline const GameSpec& validate_spec(const GameSpec& spec) {
  if (spec.n == 0 || spec.lambdas.empty())
    throw error(errc::empty_game, "a game needs at least one trader");
  if (spec.lambdas.size() != spec.n)
    throw error(errc::empty_game, "lambda count " + std::to_string(spec.lambdas.size()) +
                                      " does not match n=" + std::to_string(spec.n));
  for (std::size_t i = 0; i < spec.n; ++i) {
    if (!(spec.lambdas[i] > 0.0))
      throw error(errc::non_positive_lambda,
                  "lambda_" + std::to_string(i + 1) + " = " + std::to_string(spec.lambdas[i]));
  }
  const double sum = std::accumulate(spec.lambdas.begin(), spec.lambdas.end(), 0.0);
  if (std::abs(sum - 1.0) > kLambdaSumTolerance)
    throw error(errc::lambda_sum_mismatch, "lambdas sum to " + std::to_string(sum));
  if (!(spec.kappa >= 0.0) || !std::isfinite(spec.kappa))
    throw error(errc::negative_kappa, "kappa = " + std::to_string(spec.kappa));
  return spec;
}

inline GameSpec make_game(std::vector<double> lambdas, double kappa) {
  GameSpec spec{lambdas.size(), std::move(lambdas), kappa};
  validate_spec(spec);
  return spec;
}

inline GameSpec make_symmetric_game(std::size_t n, double kappa) {
  return make_game(std::vector<double>(n, 1.0 / static_cast<double>(n)), kappa);
}

/// Divides every lambda by their sum. Only used on explicit request.
inline std::vector<double> renormalized(std::vector<double> lambdas) {
  const double sum = std::accumulate(lambdas.begin(), lambdas.end(), 0.0);
  if (!(sum > 0.0)) throw error(errc::non_positive_lambda, "cannot renormalize a non-positive sum");
  for (double& l : lambdas) l /= sum;
  return lambdas;
}

/// Market decay rate kappa (n-1)/(n+1).
struct Alpha {
  double value = 0.0;
  bool degenerate() const noexcept { return value == 0.0; }
};

/// x / (e^x - 1), continuous at x = 0.
inline double x_over_expm1(double x) {
  if (x == 0.0) return 1.0;
  return x / std::expm1(x);
}

/// x / (1 - e^{-x}), continuous at x = 0.
inline double x_over_one_minus_exp_neg(double x) {
  if (x == 0.0) return 1.0;
  return -x / std::expm1(-x);
}

/// Unit strategy a(t) = b (e^{kappa t} - 1) + d (1 - e^{-alpha t}) + linear t.
///
/// The equilibrium branch has linear == 0; limit branches (kappa = 0, or a
/// single trader) use b = d = 0, linear = 1.
struct ClosedFormStrategy {
  double b = 0.0;
  double d = 0.0;
  double kappa = 0.0;
  double alpha = 0.0;
  double lambda = 1.0;
  double linear = 0.0;

  double value(double t) const {
    return b * std::expm1(kappa * t) - d * std::expm1(-alpha * t) + linear * t;
  }
  double rate(double t) const {
    return b * kappa * std::exp(kappa * t) + d * alpha * std::exp(-alpha * t) + linear;
  }
  double accel(double t) const {
    return b * kappa * kappa * std::exp(kappa * t) - d * alpha * alpha * std::exp(-alpha * t);
  }
};

/// m(t) = (1 - e^{-alpha t}) / (1 - e^{-alpha}); the straight line when alpha = 0.
struct MarketStrategy {
  double alpha = 0.0;

  double value(double t) const {
    if (alpha == 0.0) return t;
    return std::expm1(-alpha * t) / std::expm1(-alpha);
  }
  double rate(double t) const {
    if (alpha == 0.0) return 1.0;
    return -alpha * std::exp(-alpha * t) / std::expm1(-alpha);
  }
  double accel(double t) const {
    if (alpha == 0.0) return 0.0;
    return alpha * alpha * std::exp(-alpha * t) / std::expm1(-alpha);
  }
};

/// Samples of a path on a uniform grid over [0, 1].
struct SampledPath {
  std::vector<double> grid;
  std::vector<double> values;

  std::size_t size() const noexcept { return grid.size(); }
  std::size_t n_steps() const noexcept { return grid.empty() ? 0 : grid.size() - 1; }
};

inline std::vector<double> uniform_grid(std::size_t n_points) {
  if (n_points < 2) throw error(errc::grid_too_small, "need at least 2 grid points");
  std::vector<double> grid(n_points);
  const auto steps = static_cast<double>(n_points - 1);
  for (std::size_t k = 0; k < n_points; ++k) grid[k] = static_cast<double>(k) / steps;
  return grid;
}

struct EquilibriumSolution {
  GameSpec spec;
  std::vector<ClosedFormStrategy> strategies;
  MarketStrategy market;
  Alpha alpha;

  /// Sum of lambda_i a_i(t) over traders.
  double weighted_sum(double t) const {
    double m = 0.0;
    for (const auto& s : strategies) m += s.lambda * s.value(t);
    return m;
  }
  double weighted_rate(double t) const {
    double m = 0.0;
    for (const auto& s : strategies) m += s.lambda * s.rate(t);
    return m;
  }
  double weighted_accel(double t) const {
    double m = 0.0;
    for (const auto& s : strategies) m += s.lambda * s.accel(t);
    return m;
  }
};

struct CostBreakdown {
  std::vector<double> per_trader;
  double aggregate = 0.0;
  std::vector<double> shares;
  std::vector<double> fair_share_deviation;
};

}  // namespace posgame
