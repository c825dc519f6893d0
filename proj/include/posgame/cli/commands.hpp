#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "posgame/centralization.hpp"
#include "posgame/cli/config.hpp"
#include "posgame/cli/csv.hpp"
#include "posgame/core.hpp"
#include "posgame/costs.hpp"
#include "posgame/equilibrium.hpp"
#include "posgame/oracle.hpp"
#include "posgame/parallel.hpp"
#include "posgame/sampling.hpp"

namespace posgame::cli {

enum exit_code : int { exit_ok = 0, exit_config = 1, exit_numeric = 2 };

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandResult {
  std::vector<OutputFile> files;
  std::string report;  // human-readable summary for stdout
  int exit_code = exit_ok;
};

namespace detail {

using Row = std::vector<std::string>;

inline std::string fmt(double v) { return format_number(v); }
inline std::string fmt(std::size_t v) { return format_number(v); }
inline std::string fmt(long v) { return format_number(v); }

/// Label used in file names: "kappa_5", "kappa_0.5".
inline std::string kappa_tag(double kappa) { return "kappa_" + format_number(kappa); }

inline std::vector<double> kappa_list(const ScenarioConfig& cfg) {
  if (!cfg.sweep.kappa.empty()) return cfg.sweep.kappa;
  if (cfg.game) return {cfg.game->kappa};
  throw error(errc::config, "need 'sweep.kappa' or a 'game' section for kappa");
}

/// Trader 1 holds lambda1, the remaining n - 1 traders split 1 - lambda1 equally.
inline GameSpec one_vs_rest(std::size_t n, double lambda1, double kappa) {
  if (n < 2) throw error(errc::config, "sweep needs n >= 2 when lambda is swept");
  if (!(lambda1 > 0.0 && lambda1 < 1.0)) throw error(errc::config, "'sweep.lambda' values must lie in (0, 1)");
  std::vector<double> lambdas(n, (1.0 - lambda1) / static_cast<double>(n - 1));
  lambdas[0] = lambda1;
  return make_game(std::move(lambdas), kappa);
}

}  // namespace detail

/// Strategy table per kappa: t, a_1..a_n, m, then cost/share footer rows.
inline CommandResult cmd_equilibrium(const ScenarioConfig& cfg) {
  using detail::fmt;
  const GameSpec base = cfg.game_spec();
  const auto kappas = detail::kappa_list(cfg);
  const std::size_t n_points = cfg.grid.n_points;

  struct Panel {
    EquilibriumSolution sol;
    CostBreakdown costs;
  };
  auto panels = parallel_map(kappas.size(), [&](std::size_t k) {
    const GameSpec spec = make_game(base.lambdas, kappas[k]);
    return Panel{solve(spec), cost_breakdown(spec, LimitPolicy::extend)};
  });

  CommandResult out;
  const auto grid = uniform_grid(n_points);
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    const auto& [sol, costs] = panels[k];
    const std::size_t n = sol.spec.n;
    CsvWriter csv("equilibrium", cfg.hash);
    csv.comment("n=" + fmt(n) + " kappa=" + fmt(kappas[k]) + " alpha=" + fmt(sol.alpha.value));

    detail::Row header{"t"};
    for (std::size_t i = 0; i < n; ++i) header.push_back("a_" + std::to_string(i + 1));
    header.push_back("m");
    csv.row(header);

    for (double t : grid) {
      detail::Row r{fmt(t)};
      for (const auto& s : sol.strategies) r.push_back(fmt(s.value(t)));
      r.push_back(fmt(sol.market.value(t)));
      csv.row(r);
    }

    detail::Row lam{"lambda"}, cost{"cost"}, share{"share"}, dev{"fair_share_deviation"};
    double share_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lam.push_back(fmt(sol.spec.lambdas[i]));
      cost.push_back(fmt(costs.per_trader[i]));
      share.push_back(fmt(costs.shares[i]));
      dev.push_back(fmt(costs.fair_share_deviation[i]));
      share_sum += costs.shares[i];
    }
    lam.push_back(fmt(1.0));
    cost.push_back(fmt(costs.aggregate));
    share.push_back(fmt(share_sum));
    dev.push_back(fmt(0.0));
    csv.comment("footer: per-trader values in the a_i columns, totals in the m column");
    csv.row(lam);
    csv.row(cost);
    csv.row(share);
    csv.row(dev);

    const std::string name = "equilibrium_" + detail::kappa_tag(kappas[k]) + ".csv";
    out.files.push_back({name, csv.str()});
    out.report += name + ": n=" + fmt(n) + " kappa=" + fmt(kappas[k]) + " aggregate_cost=" + fmt(costs.aggregate) + "\n";
  }
  return out;
}

/// Cost and share table. With sweep.n and sweep.lambda set, trader 1 holds
/// lambda and the others split the rest; otherwise the game section is used.
inline CommandResult cmd_costs(const ScenarioConfig& cfg) {
  using detail::fmt;
  const auto kappas = detail::kappa_list(cfg);

  std::vector<GameSpec> specs;
  if (!cfg.sweep.lambda.empty()) {
    std::vector<std::size_t> ns = cfg.sweep.n;
    if (ns.empty()) {
      if (!cfg.game) throw error(errc::config, "need 'sweep.n' or a 'game' section for n");
      ns = {cfg.game->n};
    }
    for (std::size_t n : ns)
      for (double kappa : kappas)
        for (double l1 : cfg.sweep.lambda) specs.push_back(detail::one_vs_rest(n, l1, kappa));
  } else {
    const GameSpec base = cfg.game_spec();
    for (double kappa : kappas) specs.push_back(make_game(base.lambdas, kappa));
  }

  auto tables = parallel_map(specs.size(), [&](std::size_t k) { return cost_breakdown(specs[k], LimitPolicy::extend); });

  CsvWriter csv("costs", cfg.hash);
  csv.row({"n", "kappa", "trader", "lambda", "cost", "share", "fair_share_deviation", "aggregate"});
  double worst = 0.0;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& s = specs[k];
    const auto& c = tables[k];
    for (std::size_t i = 0; i < s.n; ++i) {
      csv.row({fmt(s.n), fmt(s.kappa), fmt(i + 1), fmt(s.lambdas[i]), fmt(c.per_trader[i]), fmt(c.shares[i]),
               fmt(c.fair_share_deviation[i]), fmt(c.aggregate)});
      worst = std::max(worst, std::abs(c.fair_share_deviation[i]));
    }
  }
  CommandResult out;
  out.files.push_back({"costs.csv", csv.str()});
  out.report = "costs.csv: " + fmt(specs.size()) + " games, largest |share - lambda| = " + fmt(worst) + "\n";
  return out;
}

/// Naive centralization table plus strategic-representation curves.
inline CommandResult cmd_centralize(const ScenarioConfig& cfg) {
  using detail::fmt;
  if (!cfg.centralization) throw error(errc::config, "missing section 'centralization'");
  const auto& cc = *cfg.centralization;
  const auto kappas = detail::kappa_list(cfg);
  const std::vector<double> lambdas = cfg.sweep.lambda.empty() ? std::vector<double>{cc.lambda_firm} : cfg.sweep.lambda;
  std::vector<std::size_t> ns = cfg.sweep.n;
  if (ns.empty()) {
    if (!cfg.game) throw error(errc::config, "need 'sweep.n' or a 'game' section for n");
    ns = {cfg.game->n};
  }
  for (double l : lambdas)
    if (!(l > 0.0 && l < 1.0)) throw error(errc::config, "firm lambda values must lie in (0, 1)");
  for (double k : kappas)
    if (!(k > 0.0)) throw error(errc::config, "centralization needs kappa > 0");
  for (std::size_t n : ns)
    for (std::size_t n1 : cc.n1_values)
      if (n1 == 0 || n1 >= n) throw error(errc::config, "centralization needs 0 < n1 < n for every n");

  struct Cell {
    double lambda;
    double kappa;
  };
  std::vector<Cell> cells;
  for (double l : lambdas)
    for (double k : kappas) cells.push_back({l, k});

  // each cell gets its own stream so results do not depend on scheduling
  auto rows = parallel_map(cells.size(), [&](std::size_t k) {
    if (cc.sampled_draws == 0) return table_row_mean(cells[k].lambda, cells[k].kappa, ns, cc.n1_values);
    return table_row_sampled(cells[k].lambda, cells[k].kappa, ns, cc.n1_values, cc.sampled_draws,
                             cfg.output.seed + 0x9e3779b97f4a7c15ULL * (k + 1));
  });

  CsvWriter table("centralize", cfg.hash);
  table.comment(cc.sampled_draws == 0 ? "mode=mean over all (n, n1) combinations"
                                      : "mode=sampled draws=" + fmt(cc.sampled_draws) + " seed=" + fmt(static_cast<std::size_t>(cfg.output.seed)));
  table.row({"lambda_firm", "kappa", "pct_change_firm", "pct_change_nonfirm", "pct_change_total", "firm_no_central",
             "firm_central", "nonfirm_no_central", "nonfirm_central", "total_no_central", "total_central"});
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& r = rows[k];
    table.row({fmt(cells[k].lambda), fmt(cells[k].kappa), fmt(r.pct_change_firm), fmt(r.pct_change_nonfirm),
               fmt(r.pct_change_total), fmt(r.firm_cost_no_central), fmt(r.firm_cost_central),
               fmt(r.nonfirm_cost_no_central), fmt(r.nonfirm_cost_central), fmt(r.total_no_central()),
               fmt(r.total_central())});
  }

  // strategic curves use the first n and n1
  const std::size_t n = ns.front();
  const std::size_t n1 = cc.n1_values.front();
  auto curves = parallel_map(cells.size(), [&](std::size_t k) {
    const auto sc = make_scenario(n1, n - n1, cells[k].lambda, cells[k].kappa);
    const DeltaRange range = cc.delta_range ? DeltaRange{cc.delta_range->first, cc.delta_range->second}
                                            : default_delta_range(sc);
    return optimal_representation(sc, range);
  });

  CsvWriter curve_csv("centralize", cfg.hash);
  curve_csv.comment("pct columns are changes against the delta=0 cost");
  curve_csv.row({"n1", "n2", "lambda_firm", "kappa", "delta", "represented", "exact_cost", "approx_cost",
                 "pct_change_exact", "pct_change_approx"});
  CsvWriter summary("centralize", cfg.hash);
  summary.row({"n1", "n2", "lambda_firm", "kappa", "continuous_opt", "represented_opt", "argmin_exact",
               "argmin_approx", "firm_limit", "nonfirm_limit"});
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto sc = make_scenario(n1, n - n1, cells[k].lambda, cells[k].kappa);
    const auto& c = curves[k];
    const double base_exact = strategic_cost(sc, 0);
    const double base_approx = strategic_cost_approx(sc, 0);
    for (std::size_t j = 0; j < c.delta_range.size(); ++j) {
      const long d = c.delta_range[j];
      curve_csv.row({fmt(n1), fmt(n - n1), fmt(sc.lambda_firm), fmt(sc.kappa), fmt(d),
                     fmt(static_cast<long>(n1) + d), fmt(c.exact_costs[j]), fmt(c.approx_costs[j]),
                     fmt(pct_change(base_exact, c.exact_costs[j])), fmt(pct_change(base_approx, c.approx_costs[j]))});
    }
    const auto lim = limiting_costs(sc);
    summary.row({fmt(n1), fmt(n - n1), fmt(sc.lambda_firm), fmt(sc.kappa), fmt(c.continuous_opt),
                 fmt(c.represented_opt(sc)), fmt(c.argmin_exact), fmt(c.argmin_approx), fmt(lim.firm),
                 fmt(lim.nonfirm)});
  }

  CommandResult out;
  out.files.push_back({"centralize_table.csv", table.str()});
  out.files.push_back({"strategic_curve.csv", curve_csv.str()});
  out.files.push_back({"strategic_summary.csv", summary.str()});
  out.report = "centralize_table.csv: " + fmt(cells.size()) + " rows\nstrategic_curve.csv: n1=" + fmt(n1) +
               " n2=" + fmt(n - n1) + " delta*=" + fmt(curves.front().continuous_opt) + "\n";
  return out;
}

/// Aggregate cost and price of anarchy over n, with the n -> infinity limit.
inline CommandResult cmd_poa(const ScenarioConfig& cfg) {
  using detail::fmt;
  const auto kappas = detail::kappa_list(cfg);
  std::vector<std::size_t> ns = cfg.sweep.n;
  if (ns.empty())
    for (std::size_t n = 2; n <= 25; ++n) ns.push_back(n);
  for (double k : kappas)
    if (!(k >= 0.0)) throw error(errc::config, "kappa must be non-negative");

  CsvWriter csv("poa", cfg.hash);
  csv.comment("pct_increase is relative to the n=2 aggregate cost");
  csv.row({"n", "kappa", "aggregate_cost", "pct_increase_vs_n2", "price_of_anarchy"});
  double worst = 0.0;
  for (double kappa : kappas) {
    const double base = aggregate_cost_extended(2, kappa);
    const double floor = market_min_cost(kappa);
    for (std::size_t n : ns) {
      const double agg = aggregate_cost_extended(n, kappa);
      const double poa = agg / floor;
      worst = std::max(worst, poa);
      csv.row({fmt(n), fmt(kappa), fmt(agg), fmt(pct_change(base, agg)), fmt(poa)});
    }
    const double lim = aggregate_cost_limit(kappa);
    csv.row({"inf", fmt(kappa), fmt(lim), fmt(pct_change(base, lim)), fmt(lim / floor)});
    worst = std::max(worst, lim / floor);
  }
  CommandResult out;
  out.files.push_back({"poa.csv", csv.str()});
  out.report = "poa.csv: " + fmt(kappas.size()) + " kappa values, max price of anarchy = " + fmt(worst) + "\n";
  return out;
}

namespace detail {

struct VerifyCheck {
  std::string name;
  std::string scenario;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

inline void perturb_for_bug(EquilibriumSolution& sol) { sol.strategies.front().d *= 1.01; }

inline std::string describe(const GameSpec& spec) {
  std::string s = "n=" + fmt(spec.n) + " kappa=" + fmt(spec.kappa) + " lambda=";
  for (std::size_t i = 0; i < spec.n; ++i) s += (i ? ";" : "") + fmt(spec.lambdas[i]);
  return s;
}

inline std::vector<VerifyCheck> verify_one(const GameSpec& spec, const OracleConfig& oc, std::uint64_t seed) {
  std::vector<VerifyCheck> checks;
  const std::string where = describe(spec);
  auto sol = solve(spec);
  if (oc.inject_bug) perturb_for_bug(sol);

  // fixed point vs closed form
  const double gap_tol = std::max(5.0 / static_cast<double>(oc.n_steps), 10.0 * oc.tol);
  try {
    const auto fp = nash_fixed_point(spec, oc.n_steps, oc.tol, oc.max_iters);
    const double gap = sup_gap(fp.game, sol);
    checks.push_back({"fixed_point_gap", where, gap, gap_tol, gap <= gap_tol});
  } catch (const error& e) {
    checks.push_back({"fixed_point_gap", where + " (" + e.what() + ")", INFINITY, gap_tol, false});
  }

  // closed-form cost vs quadrature
  double worst_rel = 0.0;
  const auto costs = cost_breakdown(spec);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double integral = integrated_trader_cost(sol, i);
    worst_rel = std::max(worst_rel, std::abs(integral - costs.per_trader[i]) / std::abs(costs.per_trader[i]));
  }
  checks.push_back({"cost_formula_vs_simpson", where, worst_rel, 1e-6, worst_rel <= 1e-6});

  // governing equations at 101 points
  double worst_res = 0.0;
  for (double t : uniform_grid(101))
    for (std::size_t i = 0; i < spec.n; ++i) {
      const auto r = ode_residuals(sol, i, t);
      worst_res = std::max({worst_res, std::abs(r.trader), std::abs(r.market_kappa), std::abs(r.market_alpha)});
    }
  checks.push_back({"ode_residual", where, worst_res, 1e-9, worst_res <= 1e-9});

  // unilateral deviations never pay
  const std::size_t n_dev = 1000;
  std::mt19937_64 rng(seed);
  std::vector<SampledPath> bumps;
  for (int mode = 1; mode <= 5; ++mode) bumps.push_back(sine_bump(n_dev, mode));
  for (int r = 0; r < 5; ++r) bumps.push_back(random_bump(n_dev, rng));
  double worst_dev = INFINITY;
  try {
    for (std::size_t i = 0; i < spec.n; ++i)
      for (const auto& b : bumps)
        for (double eps : {0.01, -0.01}) worst_dev = std::min(worst_dev, deviation_test(sol, i, b, eps));
    checks.push_back({"deviation_min_gain", where, worst_dev, -1e-9, worst_dev >= -1e-9});
  } catch (const error& e) {
    checks.push_back({"deviation_min_gain", where + " (" + e.what() + ")", -INFINITY, -1e-9, false});
  }
  return checks;
}

/// Gap ratio under grid doubling on a fixed mid-range game.
inline VerifyCheck convergence_check(const OracleConfig& oc) {
  const GameSpec spec = make_game({0.2, 0.3, 0.5}, 5.0);
  auto sol = solve(spec);
  if (oc.inject_bug) perturb_for_bug(sol);
  const std::size_t coarse = std::max<std::size_t>(100, oc.n_steps / 4);
  const double g1 = sup_gap(nash_fixed_point(spec, coarse, 1e-13, oc.max_iters).game, sol);
  const double g2 = sup_gap(nash_fixed_point(spec, 2 * coarse, 1e-13, oc.max_iters).game, sol);
  const double ratio = g1 / g2;
  return {"grid_doubling_ratio", describe(spec) + " N=" + fmt(coarse) + "->" + fmt(2 * coarse), ratio, 4.0,
          ratio >= 3.4 && ratio <= 4.6};
}

}  // namespace detail

/// Oracle cross-checks over n_values x kappa_values x lambda_draws random games.
inline CommandResult cmd_verify(const ScenarioConfig& cfg) {
  using detail::fmt;
  const auto& oc = cfg.oracle;

  std::mt19937_64 rng(cfg.output.seed);
  std::vector<GameSpec> specs;
  std::vector<std::uint64_t> seeds;
  for (std::size_t n : oc.n_values)
    for (double kappa : oc.kappa_values)
      for (std::size_t d = 0; d < oc.lambda_draws; ++d) {
        specs.push_back(make_game(random_simplex(n, rng, 0.05), kappa));
        seeds.push_back(rng());
      }

  auto per_spec = parallel_map(specs.size() + 1, [&](std::size_t k) {
    if (k == specs.size()) return std::vector<detail::VerifyCheck>{detail::convergence_check(oc)};
    return detail::verify_one(specs[k], oc, seeds[k]);
  });

  CsvWriter csv("verify", cfg.hash);
  csv.comment(std::string("n_steps=") + fmt(oc.n_steps) + " tol=" + fmt(oc.tol) +
              (oc.inject_bug ? " inject_bug=true" : ""));
  csv.row({"check", "scenario", "measured", "threshold", "result"});
  CommandResult out;
  std::size_t passed = 0, total = 0;
  for (const auto& group : per_spec)
    for (const auto& c : group) {
      ++total;
      passed += c.pass;
      csv.row({c.name, c.scenario, fmt(c.measured), fmt(c.threshold), c.pass ? "pass" : "fail"});
      out.report += std::string(c.pass ? "PASS " : "FAIL ") + c.name + " [" + c.scenario + "] measured=" +
                    fmt(c.measured) + " threshold=" + fmt(c.threshold) + "\n";
    }
  out.report += fmt(passed) + "/" + fmt(total) + " checks passed\n";
  out.files.push_back({"verify.csv", csv.str()});
  out.exit_code = passed == total ? exit_ok : exit_numeric;
  return out;
}

inline CommandResult run_command(std::string_view name, const ScenarioConfig& cfg) {
  if (name == "equilibrium") return cmd_equilibrium(cfg);
  if (name == "costs") return cmd_costs(cfg);
  if (name == "centralize") return cmd_centralize(cfg);
  if (name == "poa") return cmd_poa(cfg);
  if (name == "verify") return cmd_verify(cfg);
  throw error(errc::config, "unknown command '" + std::string(name) + "'");
}

/// Writes each file under dir, creating the directory if needed.
inline void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
  std::filesystem::create_directories(dir);
  for (const auto& f : files) {
    std::ofstream os(dir / f.name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / f.name).string());
    os << f.content;
  }
}

}  // namespace posgame::cli
