#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tvaoi/montecarlo.hpp"
#include "tvaoi/pss.hpp"
#include "tvaoi/rates.hpp"

namespace tvaoi {

/// Parsed scenario file. Missing solver and mc keys keep the defaults of
/// PssConfig / McConfig; validation settings default to the desk-scale run.
struct ScenarioConfig {
  explicit ScenarioConfig(Scenario s) : scenario(std::move(s)) {}

  Scenario scenario;
  PssConfig solver;
  McConfig mc;
  std::vector<int> path_counts{100, 500, 1000, 5000};
  double mae_threshold = 0.05;  ///< final mean-AoI MAE over the ODE mean level
  int grid_bins = 100;          ///< MC sampling phases per period
  std::string canonical;        ///< normalized JSON echo of the input
};

/// JSON document:
///   { "n_classes": 3, "period": 10.0, "t_pass": 5.0,
///     "classes": [ { "arrival": {...}, "service": {...} }, ... ],
///     "solver": { "epsilon", "max_iters", "alpha", "steps_per_period" },
///     "mc": { "n_paths", "n_trials", "warmup_periods", "sample_periods",
///             "root_seed", "path_counts", "mae_threshold", "grid_bins" } }
/// A profile is { "kind": "windowed_sinusoid", "lambda_base", "lambda_peak" }
/// (arrival) or { "kind": "windowed_sinusoid", "mu_peak" } (service), or one of
///   { "kind": "constant", "rate" }
///   { "kind": "piecewise_constant", "breakpoints": [...], "values": [...] }
///   { "kind": "sampled", "samples": [...] }
/// "kind" defaults to windowed_sinusoid; a profile may override "t_pass".
/// Throws ConfigError on malformed or invalid input.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace tvaoi
