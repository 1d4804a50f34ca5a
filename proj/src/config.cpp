#include "tvaoi/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tvaoi/error.hpp"
#include "tvaoi/state_space.hpp"

namespace tvaoi {
namespace {

using nlohmann::json;

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T require(const json& obj, const char* key) {
  if (!obj.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  return get_or<T>(obj, key, T{});
}

RateProfile parse_profile(const json& j, bool arrival, double period, double t_pass) {
  if (!j.is_object()) throw ConfigError("rate profile must be an object");
  const auto kind = get_or<std::string>(j, "kind", "windowed_sinusoid");
  const double pass = get_or<double>(j, "t_pass", t_pass);
  if (kind == "windowed_sinusoid") {
    if (arrival) {
      return {WindowedSinusoidArrival{require<double>(j, "lambda_base"),
                                      require<double>(j, "lambda_peak"), pass},
              period};
    }
    return {WindowedSinusoidService{require<double>(j, "mu_peak"), pass}, period};
  }
  if (kind == "constant") {
    return RateProfile::constant(require<double>(j, "rate"), period);
  }
  if (kind == "piecewise_constant") {
    return {PiecewiseConstant{require<std::vector<double>>(j, "breakpoints"),
                              require<std::vector<double>>(j, "values")},
            period};
  }
  if (kind == "sampled") {
    return {SampledTable{require<std::vector<double>>(j, "samples")}, period};
  }
  throw ConfigError("unknown profile kind '" + kind + "'");
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  const int n_classes = require<int>(doc, "n_classes");
  if (n_classes < 1 || n_classes > kMaxClasses) {
    throw ConfigError("n_classes must be in 1.." + std::to_string(kMaxClasses));
  }
  const double period = require<double>(doc, "period");
  if (!(period > 0.0)) throw ConfigError("period must be positive");
  const double t_pass = get_or<double>(doc, "t_pass", period);
  if (!(t_pass > 0.0)) throw ConfigError("t_pass must be positive");
  if (t_pass > period) throw ConfigError("t_pass must not exceed the period");

  const json classes = doc.contains("classes") ? doc.at("classes") : json::array();
  if (!classes.is_array() || classes.size() != static_cast<std::size_t>(n_classes)) {
    throw ConfigError("'classes' must list exactly n_classes entries");
  }
  std::vector<RateProfile> arrival, service;
  for (const auto& c : classes) {
    if (!c.is_object() || !c.contains("arrival") || !c.contains("service")) {
      throw ConfigError("each class needs 'arrival' and 'service' profiles");
    }
    arrival.push_back(parse_profile(c.at("arrival"), true, period, t_pass));
    service.push_back(parse_profile(c.at("service"), false, period, t_pass));
  }

  ScenarioConfig cfg(Scenario(period, std::move(arrival), std::move(service)));
  const json solver = doc.value("solver", json::object());
  cfg.solver.epsilon = get_or(solver, "epsilon", cfg.solver.epsilon);
  cfg.solver.max_iters = get_or(solver, "max_iters", cfg.solver.max_iters);
  cfg.solver.alpha = get_or(solver, "alpha", cfg.solver.alpha);
  cfg.solver.integration.steps_per_period =
      get_or(solver, "steps_per_period", cfg.solver.integration.steps_per_period);
  validate(cfg.solver);

  const json mc = doc.value("mc", json::object());
  cfg.mc.n_paths = get_or(mc, "n_paths", cfg.mc.n_paths);
  cfg.mc.n_trials = get_or(mc, "n_trials", cfg.mc.n_trials);
  cfg.mc.warmup_periods = get_or(mc, "warmup_periods", cfg.mc.warmup_periods);
  cfg.mc.sample_periods = get_or(mc, "sample_periods", cfg.mc.sample_periods);
  cfg.mc.root_seed = get_or(mc, "root_seed", cfg.mc.root_seed);
  cfg.path_counts = get_or(mc, "path_counts", cfg.path_counts);
  cfg.mae_threshold = get_or(mc, "mae_threshold", cfg.mae_threshold);
  cfg.grid_bins = get_or(mc, "grid_bins", cfg.grid_bins);
  validate(cfg.mc);
  if (cfg.path_counts.empty()) throw ConfigError("path_counts must not be empty");
  for (int n : cfg.path_counts) {
    if (n < 1) throw ConfigError("path counts must be positive");
  }
  if (!(cfg.mae_threshold > 0.0)) throw ConfigError("mae_threshold must be positive");
  if (cfg.grid_bins < 1) throw ConfigError("grid_bins must be at least 1");

  cfg.canonical = doc.dump(2);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace tvaoi
