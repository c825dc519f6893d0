#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "posgame/cli/csv.hpp"
#include "posgame/core.hpp"

namespace posgame::cli {

struct GameConfig {
  std::size_t n = 0;
  std::vector<double> lambdas;
  bool symmetric = false;
  double kappa = 0.0;
};

struct GridConfig {
  std::size_t n_points = 101;
};

struct CentralizationConfig {
  std::vector<std::size_t> n1_values;
  double lambda_firm = 0.0;
  std::optional<std::pair<long, long>> delta_range;
  std::size_t sampled_draws = 0;  // 0: deterministic mean over all (n, n1) combinations
};

struct SweepConfig {
  std::vector<double> kappa;
  std::vector<std::size_t> n;
  std::vector<double> lambda;
};

struct OracleConfig {
  std::size_t n_steps = 2000;
  double tol = 1e-8;
  std::size_t max_iters = 10000;
  std::vector<std::size_t> n_values{2, 3, 5};
  std::vector<double> kappa_values{1.0, 5.0, 25.0};
  std::size_t lambda_draws = 3;
  bool inject_bug = false;
};

struct OutputConfig {
  std::string directory = ".";
  std::string format = "csv";
  std::uint64_t seed = 0;
};

struct ScenarioConfig {
  std::optional<GameConfig> game;
  GridConfig grid;
  std::optional<CentralizationConfig> centralization;
  SweepConfig sweep;
  OracleConfig oracle;
  OutputConfig output;
  std::string hash;  // of the canonical config text plus overrides

  /// Validated spec built from the game section.
  GameSpec game_spec() const {
    if (!game) throw error(errc::config, "missing section 'game'");
    return make_game(game->lambdas, game->kappa);
  }
};

struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool renormalize_lambdas = false;
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto k : known) ok = ok || it.key() == k;
    if (!ok) throw error(errc::config, "unknown key '" + (where.empty() ? "" : std::string(where) + ".") + it.key() + "'");
  }
}

inline const json& object_at(const json& parent, std::string_view key, std::string_view where) {
  const auto& v = parent.at(std::string(key));
  if (!v.is_object()) throw error(errc::config, "'" + std::string(where) + "' must be an object");
  return v;
}

inline double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw error(errc::config, "'" + where + "' must be a number");
  return v.get<double>();
}

inline std::size_t count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw error(errc::config, "'" + where + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

inline long integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw error(errc::config, "'" + where + "' must be an integer");
  return v.get<long>();
}

inline std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw error(errc::config, "'" + where + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

inline std::vector<std::size_t> counts(const json& v, const std::string& where) {
  if (!v.is_array()) throw error(errc::config, "'" + where + "' must be an array of integers");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(count(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

inline GameConfig parse_game(const json& g, bool renormalize) {
  reject_unknown(g, "game", {"n", "lambdas", "symmetric", "kappa"});
  GameConfig out;
  if (!g.contains("kappa")) throw error(errc::config, "missing key 'game.kappa'");
  out.kappa = number(g["kappa"], "game.kappa");
  if (g.contains("symmetric")) {
    if (!g["symmetric"].is_boolean()) throw error(errc::config, "'game.symmetric' must be a boolean");
    out.symmetric = g["symmetric"].get<bool>();
  }
  if (out.symmetric) {
    if (g.contains("lambdas")) throw error(errc::config, "'game.lambdas' conflicts with 'game.symmetric'");
    if (!g.contains("n")) throw error(errc::config, "missing key 'game.n' (required with symmetric)");
    out.n = count(g["n"], "game.n");
    if (out.n == 0) throw error(errc::config, "'game.n' must be positive");
    out.lambdas.assign(out.n, 1.0 / static_cast<double>(out.n));
  } else {
    if (!g.contains("lambdas")) throw error(errc::config, "missing key 'game.lambdas' (or set 'game.symmetric')");
    out.lambdas = numbers(g["lambdas"], "game.lambdas");
    if (renormalize) out.lambdas = renormalized(out.lambdas);
    out.n = out.lambdas.size();
    if (g.contains("n") && count(g["n"], "game.n") != out.n)
      throw error(errc::config, "'game.n' does not match the length of 'game.lambdas'");
  }
  try {
    validate_spec(GameSpec{out.n, out.lambdas, out.kappa});
  } catch (const error& e) {
    throw error(errc::config, std::string("section 'game': ") + e.what());
  }
  return out;
}

}  // namespace detail

/// Parses and validates a JSON scenario. Unknown keys are rejected.
inline ScenarioConfig parse_config(std::string_view text, const Overrides& overrides = {}) {
  using detail::json;
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw error(errc::config, e.what());
  }
  if (!root.is_object()) throw error(errc::config, "top level must be a JSON object");
  detail::reject_unknown(root, "", {"game", "grid", "centralization", "sweep", "oracle", "output"});

  ScenarioConfig cfg;
  try {
    if (root.contains("game"))
      cfg.game = detail::parse_game(detail::object_at(root, "game", "game"), overrides.renormalize_lambdas);

    if (root.contains("grid")) {
      const auto& g = detail::object_at(root, "grid", "grid");
      detail::reject_unknown(g, "grid", {"n_points"});
      if (g.contains("n_points")) cfg.grid.n_points = detail::count(g["n_points"], "grid.n_points");
      if (cfg.grid.n_points < 2) throw error(errc::config, "'grid.n_points' must be at least 2");
    }

    if (root.contains("centralization")) {
      const auto& c = detail::object_at(root, "centralization", "centralization");
      detail::reject_unknown(c, "centralization", {"n1", "n1_values", "lambda_firm", "delta_range", "sampled_draws"});
      CentralizationConfig cc;
      if (c.contains("n1") && c.contains("n1_values"))
        throw error(errc::config, "give either 'centralization.n1' or 'centralization.n1_values'");
      if (c.contains("n1")) cc.n1_values = {detail::count(c["n1"], "centralization.n1")};
      if (c.contains("n1_values")) cc.n1_values = detail::counts(c["n1_values"], "centralization.n1_values");
      if (cc.n1_values.empty()) throw error(errc::config, "missing key 'centralization.n1'");
      if (!c.contains("lambda_firm")) throw error(errc::config, "missing key 'centralization.lambda_firm'");
      cc.lambda_firm = detail::number(c["lambda_firm"], "centralization.lambda_firm");
      if (c.contains("delta_range")) {
        const auto& r = c["delta_range"];
        if (!r.is_array() || r.size() != 2)
          throw error(errc::config, "'centralization.delta_range' must be [lo, hi]");
        cc.delta_range = {detail::integer(r[0], "centralization.delta_range[0]"),
                          detail::integer(r[1], "centralization.delta_range[1]")};
      }
      if (c.contains("sampled_draws"))
        cc.sampled_draws = detail::count(c["sampled_draws"], "centralization.sampled_draws");
      cfg.centralization = cc;
    }

    if (root.contains("sweep")) {
      const auto& s = detail::object_at(root, "sweep", "sweep");
      detail::reject_unknown(s, "sweep", {"kappa", "n", "lambda"});
      if (s.contains("kappa")) cfg.sweep.kappa = detail::numbers(s["kappa"], "sweep.kappa");
      if (s.contains("n")) cfg.sweep.n = detail::counts(s["n"], "sweep.n");
      if (s.contains("lambda")) cfg.sweep.lambda = detail::numbers(s["lambda"], "sweep.lambda");
      for (double k : cfg.sweep.kappa)
        if (!(k >= 0.0)) throw error(errc::config, "'sweep.kappa' values must be non-negative");
      for (std::size_t n : cfg.sweep.n)
        if (n == 0) throw error(errc::config, "'sweep.n' values must be positive");
    }

    if (root.contains("oracle")) {
      const auto& o = detail::object_at(root, "oracle", "oracle");
      detail::reject_unknown(o, "oracle",
                             {"n_steps", "tol", "max_iters", "n_values", "kappa_values", "lambda_draws", "inject_bug"});
      auto& oc = cfg.oracle;
      if (o.contains("n_steps")) oc.n_steps = detail::count(o["n_steps"], "oracle.n_steps");
      if (o.contains("tol")) oc.tol = detail::number(o["tol"], "oracle.tol");
      if (o.contains("max_iters")) oc.max_iters = detail::count(o["max_iters"], "oracle.max_iters");
      if (o.contains("n_values")) oc.n_values = detail::counts(o["n_values"], "oracle.n_values");
      if (o.contains("kappa_values")) oc.kappa_values = detail::numbers(o["kappa_values"], "oracle.kappa_values");
      if (o.contains("lambda_draws")) oc.lambda_draws = detail::count(o["lambda_draws"], "oracle.lambda_draws");
      if (o.contains("inject_bug")) {
        if (!o["inject_bug"].is_boolean()) throw error(errc::config, "'oracle.inject_bug' must be a boolean");
        oc.inject_bug = o["inject_bug"].get<bool>();
      }
      if (oc.n_steps < 100) throw error(errc::config, "'oracle.n_steps' must be at least 100");
      if (!(oc.tol > 0.0)) throw error(errc::config, "'oracle.tol' must be positive");
      for (std::size_t n : oc.n_values)
        if (n < 2) throw error(errc::config, "'oracle.n_values' entries must be at least 2");
      for (double k : oc.kappa_values)
        if (!(k > 0.0)) throw error(errc::config, "'oracle.kappa_values' entries must be positive");
    }

    if (root.contains("output")) {
      const auto& o = detail::object_at(root, "output", "output");
      detail::reject_unknown(o, "output", {"directory", "format", "seed"});
      if (o.contains("directory")) {
        if (!o["directory"].is_string()) throw error(errc::config, "'output.directory' must be a string");
        cfg.output.directory = o["directory"].get<std::string>();
      }
      if (o.contains("format")) {
        if (!o["format"].is_string() || o["format"].get<std::string>() != "csv")
          throw error(errc::config, "'output.format' must be \"csv\"");
      }
      if (o.contains("seed")) {
        if (!o["seed"].is_number_unsigned()) throw error(errc::config, "'output.seed' must be an unsigned integer");
        cfg.output.seed = o["seed"].get<std::uint64_t>();
      }
    }
  } catch (const json::exception& e) {
    throw error(errc::config, e.what());
  }

  if (overrides.out_dir) cfg.output.directory = *overrides.out_dir;
  if (overrides.seed) cfg.output.seed = *overrides.seed;

  // directory does not affect file contents, so it stays out of the hash
  std::string canonical = root.dump();
  canonical += "|seed=" + std::to_string(cfg.output.seed);
  canonical += overrides.renormalize_lambdas ? "|renormalize" : "";
  cfg.hash = hex64(fnv1a(canonical));
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path, const Overrides& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw error(errc::config, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace posgame::cli
