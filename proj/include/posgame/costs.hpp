#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "posgame/core.hpp"
#include "posgame/equilibrium.hpp"

// All costs are in scaled units: temporary-impact coefficient 1, total
// quantity 1, trading horizon [0, 1].

namespace posgame {

namespace detail {

inline void require_nondegenerate(std::size_t n, double kappa, const char* what) {
  if (n < 2 || !(kappa > 0.0))
    throw error(errc::degenerate_alpha, std::string(what) + " needs n >= 2 and kappa > 0 (n=" +
                                            std::to_string(n) + ", kappa=" + std::to_string(kappa) + ")");
}

}  // namespace detail

/// Equilibrium implementation cost of trader i:
/// kappa (lambda_i n - 1) / (n (1 - e^{-kappa})) + alpha / (n (e^alpha - 1)) + kappa / (n + 1).
inline double trader_cost(const GameSpec& spec, std::size_t i) {
  validate_spec(spec);
  detail::require_nondegenerate(spec.n, spec.kappa, "trader_cost");
  const auto n = static_cast<double>(spec.n);
  const double kappa = spec.kappa;
  const double alpha = compute_alpha(spec.n, kappa).value;
  const double lambda = spec.lambdas.at(i);
  return kappa * (lambda * n - 1.0) / (n * -std::expm1(-kappa)) + alpha / (n * std::expm1(alpha)) +
         kappa / (n + 1.0);
}

/// Same formula extended by continuity to kappa = 0 (cost -> lambda_i) and to
/// a single trader (cost -> 1 + kappa / 2, the straight-line cost).
inline double trader_cost_extended(const GameSpec& spec, std::size_t i) {
  validate_spec(spec);
  const auto n = static_cast<double>(spec.n);
  const double kappa = spec.kappa;
  const double alpha = compute_alpha(spec.n, kappa).value;
  const double lambda = spec.lambdas.at(i);
  return (lambda * n - 1.0) / n * x_over_one_minus_exp_neg(kappa) + x_over_expm1(alpha) / n +
         kappa / (n + 1.0);
}

/// Sum of all traders' equilibrium costs, alpha / (e^alpha - 1) + kappa n / (n + 1).
/// Independent of how the target quantities are split.
inline double aggregate_cost(std::size_t n, double kappa) {
  detail::require_nondegenerate(n, kappa, "aggregate_cost");
  const double alpha = compute_alpha(n, kappa).value;
  const auto nd = static_cast<double>(n);
  return alpha / std::expm1(alpha) + kappa * nd / (nd + 1.0);
}

inline double aggregate_cost_extended(std::size_t n, double kappa) {
  if (n == 0) throw error(errc::empty_game, "aggregate_cost_extended needs n >= 1");
  const auto nd = static_cast<double>(n);
  return x_over_expm1(compute_alpha(n, kappa).value) + kappa * nd / (nd + 1.0);
}

/// Limit of the aggregate cost as n grows without bound: kappa / (1 - e^{-kappa}).
inline double aggregate_cost_limit(double kappa) { return x_over_one_minus_exp_neg(kappa); }

/// Cost of the cost-minimizing centralized strategy m(t) = t.
inline double market_min_cost(double kappa) {
  if (!(kappa >= 0.0)) throw error(errc::negative_kappa, "kappa = " + std::to_string(kappa));
  return 1.0 + kappa / 2.0;
}

/// Ratio of non-cooperative aggregate cost to the market-wide minimum. Always < 2.
inline double price_of_anarchy(std::size_t n, double kappa) {
  return aggregate_cost_extended(n, kappa) / market_min_cost(kappa);
}

inline double price_of_anarchy_limit(double kappa) {
  return aggregate_cost_limit(kappa) / market_min_cost(kappa);
}

/// Trader i's share of aggregate cost; affine in lambda_i.
inline double cost_share(const GameSpec& spec, std::size_t i) {
  validate_spec(spec);
  detail::require_nondegenerate(spec.n, spec.kappa, "cost_share");
  const auto n = static_cast<double>(spec.n);
  const double kappa = spec.kappa;
  const double alpha = compute_alpha(spec.n, kappa).value;
  const double e_alpha = std::exp(alpha);
  const double denom = 1.0 - n * e_alpha;
  if (!(denom < 0.0)) throw error(errc::degenerate_alpha, "1 - n e^alpha must be negative");
  const double slope = (n + 1.0) * std::expm1(alpha) / (-std::expm1(-kappa) * denom);
  return 1.0 / n + slope / n - slope * spec.lambdas.at(i);
}

enum class LimitPolicy {
  reject,  // throw DegenerateAlpha for n = 1 or kappa = 0
  extend,  // use the continuous extension of the cost formulas
};

inline CostBreakdown cost_breakdown(const GameSpec& spec, LimitPolicy policy = LimitPolicy::reject) {
  validate_spec(spec);
  CostBreakdown out;
  out.per_trader.resize(spec.n);
  out.shares.resize(spec.n);
  out.fair_share_deviation.resize(spec.n);

  const bool degenerate = compute_alpha(spec.n, spec.kappa).degenerate();
  if (degenerate && policy == LimitPolicy::reject)
    detail::require_nondegenerate(spec.n, spec.kappa, "cost_breakdown");

  if (!degenerate) {
    out.aggregate = aggregate_cost(spec.n, spec.kappa);
    for (std::size_t i = 0; i < spec.n; ++i) {
      out.per_trader[i] = trader_cost(spec, i);
      out.shares[i] = cost_share(spec, i);
    }
  } else {
    out.aggregate = aggregate_cost_extended(spec.n, spec.kappa);
    for (std::size_t i = 0; i < spec.n; ++i) {
      out.per_trader[i] = trader_cost_extended(spec, i);
      out.shares[i] = out.per_trader[i] / out.aggregate;
    }
  }
  for (std::size_t i = 0; i < spec.n; ++i) out.fair_share_deviation[i] = out.shares[i] - spec.lambdas[i];
  return out;
}

}  // namespace posgame
