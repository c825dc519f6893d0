#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "posgame/core.hpp"

// Firm vs. non-firm costs. A firm runs n1 of the n = n1 + n2 traders and
// holds the aggregate fraction lambda_firm of the total target quantity.

namespace posgame {

struct CentralizationScenario {
  std::size_t n1 = 1;
  std::size_t n2 = 1;
  double lambda_firm = 0.5;
  double lambda_nonfirm = 0.5;
  double kappa = 1.0;

  std::size_t n() const noexcept { return n1 + n2; }
};

inline CentralizationScenario make_scenario(std::size_t n1, std::size_t n2, double lambda_firm, double kappa) {
  if (n1 < 1 || n2 < 1)
    throw error(errc::invalid_scenario, "need n1 >= 1 and n2 >= 1 (n1=" + std::to_string(n1) +
                                            ", n2=" + std::to_string(n2) + ")");
  if (!(lambda_firm > 0.0 && lambda_firm < 1.0))
    throw error(errc::invalid_scenario, "lambda_firm must lie in (0, 1), got " + std::to_string(lambda_firm));
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw error(errc::negative_kappa, "kappa = " + std::to_string(kappa));
  return CentralizationScenario{n1, n2, lambda_firm, 1.0 - lambda_firm, kappa};
}

namespace detail {

inline void require_kappa(const CentralizationScenario& sc, const char* what) {
  if (!(sc.kappa > 0.0)) throw error(errc::degenerate_alpha, std::string(what) + " needs kappa > 0");
}

}  // namespace detail

inline double firm_cost_no_centralization(const CentralizationScenario& sc) {
  detail::require_kappa(sc, "firm_cost_no_centralization");
  const auto n = static_cast<double>(sc.n());
  const auto n1 = static_cast<double>(sc.n1);
  const double k = sc.kappa;
  const double alpha = k * (n - 1.0) / (n + 1.0);
  return k * (sc.lambda_firm * n - n1) / (n * -std::expm1(-k)) + alpha * n1 / (n * std::expm1(alpha)) +
         n1 * k / (n + 1.0);
}

inline double nonfirm_cost_no_centralization(const CentralizationScenario& sc) {
  detail::require_kappa(sc, "nonfirm_cost_no_centralization");
  const auto n = static_cast<double>(sc.n());
  const auto n2 = static_cast<double>(sc.n2);
  const double k = sc.kappa;
  const double alpha = k * (n - 1.0) / (n + 1.0);
  return k * (sc.lambda_nonfirm * n - n2) / (n * -std::expm1(-k)) + alpha * n2 / (n * std::expm1(alpha)) +
         n2 * k / (n + 1.0);
}

/// Decay rate once the firm trades as one: the game has n2 + 1 traders, so
/// alpha-hat = kappa n2 / (n2 + 2).
inline double centralized_alpha(const CentralizationScenario& sc) {
  const auto n2 = static_cast<double>(sc.n2);
  return sc.kappa * n2 / (n2 + 2.0);
}

inline double firm_cost_centralized(const CentralizationScenario& sc) {
  detail::require_kappa(sc, "firm_cost_centralized");
  const auto n2 = static_cast<double>(sc.n2);
  const double k = sc.kappa;
  const double ah = centralized_alpha(sc);
  return k * (sc.lambda_firm * (n2 + 1.0) - 1.0) / ((n2 + 1.0) * -std::expm1(-k)) +
         ah / ((n2 + 1.0) * std::expm1(ah)) + k / (n2 + 2.0);
}

inline double nonfirm_cost_centralized(const CentralizationScenario& sc) {
  detail::require_kappa(sc, "nonfirm_cost_centralized");
  const auto n2 = static_cast<double>(sc.n2);
  const double k = sc.kappa;
  const double ah = centralized_alpha(sc);
  return k * (sc.lambda_nonfirm * (n2 + 1.0) - n2) / ((n2 + 1.0) * -std::expm1(-k)) +
         ah * n2 / ((n2 + 1.0) * std::expm1(ah)) + k * n2 / (n2 + 2.0);
}

struct CentralizationReport {
  double firm_cost_no_central = 0.0;
  double nonfirm_cost_no_central = 0.0;
  double firm_cost_central = 0.0;
  double nonfirm_cost_central = 0.0;
  double pct_change_firm = 0.0;
  double pct_change_nonfirm = 0.0;
  double pct_change_total = 0.0;

  double total_no_central() const noexcept { return firm_cost_no_central + nonfirm_cost_no_central; }
  double total_central() const noexcept { return firm_cost_central + nonfirm_cost_central; }
};

inline double pct_change(double before, double after) { return 100.0 * (after - before) / before; }

inline void fill_pct_changes(CentralizationReport& r) {
  r.pct_change_firm = pct_change(r.firm_cost_no_central, r.firm_cost_central);
  r.pct_change_nonfirm = pct_change(r.nonfirm_cost_no_central, r.nonfirm_cost_central);
  r.pct_change_total = pct_change(r.total_no_central(), r.total_central());
}

inline CentralizationReport naive_centralization_report(const CentralizationScenario& sc) {
  CentralizationReport r;
  r.firm_cost_no_central = firm_cost_no_centralization(sc);
  r.nonfirm_cost_no_central = nonfirm_cost_no_centralization(sc);
  r.firm_cost_central = firm_cost_centralized(sc);
  r.nonfirm_cost_central = nonfirm_cost_centralized(sc);
  fill_pct_changes(r);
  return r;
}

/// Averages the four cost quadrants over scenarios; percent changes are taken
/// on the averaged costs.
inline CentralizationReport mean_report(std::span<const CentralizationScenario> scenarios) {
  if (scenarios.empty()) throw error(errc::invalid_scenario, "no scenarios to average");
  CentralizationReport acc;
  for (const auto& sc : scenarios) {
    const auto r = naive_centralization_report(sc);
    acc.firm_cost_no_central += r.firm_cost_no_central;
    acc.nonfirm_cost_no_central += r.nonfirm_cost_no_central;
    acc.firm_cost_central += r.firm_cost_central;
    acc.nonfirm_cost_central += r.nonfirm_cost_central;
  }
  const auto count = static_cast<double>(scenarios.size());
  acc.firm_cost_no_central /= count;
  acc.nonfirm_cost_no_central /= count;
  acc.firm_cost_central /= count;
  acc.nonfirm_cost_central /= count;
  fill_pct_changes(acc);
  return acc;
}

/// Table-row reproduction: mean over every (n, n1) combination.
inline CentralizationReport table_row_mean(double lambda_firm, double kappa, std::span<const std::size_t> n_values,
                                           std::span<const std::size_t> n1_values) {
  std::vector<CentralizationScenario> scenarios;
  for (std::size_t n : n_values)
    for (std::size_t n1 : n1_values) {
      if (n1 >= n) throw error(errc::invalid_scenario, "n1 must be smaller than n");
      scenarios.push_back(make_scenario(n1, n - n1, lambda_firm, kappa));
    }
  return mean_report(scenarios);
}

/// Table-row reproduction with (n, n1) drawn uniformly from the given sets.
inline CentralizationReport table_row_sampled(double lambda_firm, double kappa,
                                              std::span<const std::size_t> n_values,
                                              std::span<const std::size_t> n1_values, std::size_t draws,
                                              std::uint64_t seed) {
  if (draws == 0 || n_values.empty() || n1_values.empty())
    throw error(errc::invalid_scenario, "sampled table row needs draws > 0 and non-empty value sets");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_n(0, n_values.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_n1(0, n1_values.size() - 1);
  std::vector<CentralizationScenario> scenarios;
  scenarios.reserve(draws);
  for (std::size_t d = 0; d < draws; ++d) {
    const std::size_t n = n_values[pick_n(rng)];
    const std::size_t n1 = n1_values[pick_n1(rng)];
    if (n1 >= n) throw error(errc::invalid_scenario, "n1 must be smaller than n");
    scenarios.push_back(make_scenario(n1, n - n1, lambda_firm, kappa));
  }
  return mean_report(scenarios);
}

namespace detail {

inline void require_representation(const CentralizationScenario& sc, long delta) {
  if (static_cast<long>(sc.n1) + delta < 1)
    throw error(errc::representation_too_small,
                "n1 + delta = " + std::to_string(static_cast<long>(sc.n1) + delta) + " < 1");
}

}  // namespace detail

/// Firm cost after centralizing and presenting n1 + delta traders to the
/// market, which then plays an (n + delta)-trader equilibrium.
inline double strategic_cost(const CentralizationScenario& sc, long delta) {
  detail::require_representation(sc, delta);
  detail::require_kappa(sc, "strategic_cost");
  const double k = sc.kappa;
  const double s = static_cast<double>(sc.n()) + static_cast<double>(delta);
  const double c = static_cast<double>(sc.n1) + static_cast<double>(delta);
  const double ah = k * (s - 1.0) / (s + 1.0);
  return k * (sc.lambda_firm * s - c) / (s * -std::expm1(-k)) + k * c / (s + 1.0) + ah * c / (s * std::expm1(ah));
}

/// strategic_cost with alpha-hat replaced by kappa.
inline double strategic_cost_approx(const CentralizationScenario& sc, long delta) {
  detail::require_representation(sc, delta);
  detail::require_kappa(sc, "strategic_cost_approx");
  const double k = sc.kappa;
  const double s = static_cast<double>(sc.n()) + static_cast<double>(delta);
  const double c = static_cast<double>(sc.n1) + static_cast<double>(delta);
  return k * (sc.lambda_firm * s - c) / (s * -std::expm1(-k)) + k * c / (s * std::expm1(k)) + k * c / (s + 1.0);
}

/// Minimizer of the approximate curve over real delta: -n1 + sqrt(n2 (n2 + 1)).
/// Does not depend on lambda_firm or kappa.
inline double continuous_optimal_delta(const CentralizationScenario& sc) {
  const auto n2 = static_cast<double>(sc.n2);
  return -static_cast<double>(sc.n1) + std::sqrt(n2 * (n2 + 1.0));
}

struct StrategicCurve {
  std::vector<long> delta_range;
  std::vector<double> exact_costs;
  std::vector<double> approx_costs;
  long argmin_exact = 0;
  long argmin_approx = 0;
  double continuous_opt = 0.0;

  /// Number of traders the firm should present, sqrt(n2 (n2 + 1)).
  double represented_opt(const CentralizationScenario& sc) const {
    return static_cast<double>(sc.n1) + continuous_opt;
  }
};

struct DeltaRange {
  long lo;
  long hi;
};

inline DeltaRange default_delta_range(const CentralizationScenario& sc) {
  return DeltaRange{1 - static_cast<long>(sc.n1), static_cast<long>(sc.n1 + 2 * sc.n2) + 10};
}

inline StrategicCurve optimal_representation(const CentralizationScenario& sc, DeltaRange range) {
  if (range.lo > range.hi) std::swap(range.lo, range.hi);
  range.lo = std::max(range.lo, 1 - static_cast<long>(sc.n1));
  if (range.lo > range.hi) throw error(errc::representation_too_small, "delta range lies below 1 - n1");

  StrategicCurve curve;
  curve.continuous_opt = continuous_optimal_delta(sc);
  for (long d = range.lo; d <= range.hi; ++d) {
    curve.delta_range.push_back(d);
    curve.exact_costs.push_back(strategic_cost(sc, d));
    curve.approx_costs.push_back(strategic_cost_approx(sc, d));
  }
  // first minimum wins ties
  const auto ex = std::min_element(curve.exact_costs.begin(), curve.exact_costs.end());
  const auto ap = std::min_element(curve.approx_costs.begin(), curve.approx_costs.end());
  curve.argmin_exact = curve.delta_range[static_cast<std::size_t>(ex - curve.exact_costs.begin())];
  curve.argmin_approx = curve.delta_range[static_cast<std::size_t>(ap - curve.approx_costs.begin())];
  return curve;
}

inline StrategicCurve optimal_representation(const CentralizationScenario& sc) {
  return optimal_representation(sc, default_delta_range(sc));
}

struct LimitingCosts {
  double firm;
  double nonfirm;
};

/// Costs as the firm splits into ever more traders: each side pays
/// kappa lambda / (1 - e^{-kappa}).
inline LimitingCosts limiting_costs(const CentralizationScenario& sc) {
  const double q = x_over_one_minus_exp_neg(sc.kappa);
  return LimitingCosts{q * sc.lambda_firm, q * sc.lambda_nonfirm};
}

}  // namespace posgame
