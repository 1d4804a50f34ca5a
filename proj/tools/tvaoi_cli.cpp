// tvaoi: periodic steady-state AoI solver, Monte Carlo validation and
// Floquet diagnostic for the time-varying priority queue.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "tvaoi/config.hpp"
#include "tvaoi/error.hpp"
#include "tvaoi/metrics.hpp"
#include "tvaoi/montecarlo.hpp"
#include "tvaoi/pss.hpp"
#include "tvaoi/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kConfig = 2, kNoConvergence = 3, kUnstable = 4, kValidation = 5 };

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> paths;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
};

std::optional<fs::path> output_dir(const Options& opt) {
  if (opt.out) return fs::path(*opt.out);
  if (const char* env = std::getenv("TVAOI_OUT_DIR"); env && *env) return fs::path(env);
  return std::nullopt;
}

tvaoi::ScenarioConfig load(const Options& opt) {
  auto cfg = tvaoi::load_config(opt.config);
  if (opt.steps) {
    cfg.solver.integration.steps_per_period = *opt.steps;
    tvaoi::validate(cfg.solver);
  }
  if (opt.seed) cfg.mc.root_seed = *opt.seed;
  if (opt.paths) {
    if (*opt.paths < 1) throw tvaoi::ConfigError("--paths must be at least 1");
    cfg.mc.n_paths = *opt.paths;
    std::erase_if(cfg.path_counts, [&](int n) { return n >= *opt.paths; });
    cfg.path_counts.push_back(*opt.paths);
  }
  return cfg;
}

std::ofstream open_csv(const fs::path& dir, const char* name) {
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  return f;
}

json manifest_base(const char* command, const Options& opt, const tvaoi::ScenarioConfig& cfg) {
  json m;
  m["command"] = command;
  m["tool_version"] = kVersion;
  m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                       std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION);
  m["compiler"] = __VERSION__;
  m["config_path"] = opt.config;
  m["config"] = json::parse(cfg.canonical);
  m["effective"] = {
      {"steps_per_period", cfg.solver.integration.steps_per_period},
      {"epsilon", cfg.solver.epsilon},
      {"max_iters", cfg.solver.max_iters},
      {"alpha", cfg.solver.alpha},
      {"n_paths", cfg.mc.n_paths},
      {"n_trials", cfg.mc.n_trials},
      {"warmup_periods", cfg.mc.warmup_periods},
      {"sample_periods", cfg.mc.sample_periods},
      {"root_seed", cfg.mc.root_seed},
      {"path_counts", cfg.path_counts},
      {"grid_bins", cfg.grid_bins},
      {"mae_threshold", cfg.mae_threshold},
      {"seed_rule", "splitmix64(root_seed ^ splitmix64((trial << 32) | path))"},
  };
  return m;
}

void write_manifest(const fs::path& dir, const json& m) {
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  f << m.dump(2) << '\n';
}

void add_solution(json& m, const tvaoi::PssSolution& sol) {
  m["pss"] = {{"converged", sol.converged},
              {"iterations", sol.iterations},
              {"final_residual", sol.residual_history.empty() ? 0.0 : sol.residual_history.back()},
              {"periodicity_residual", sol.periodicity_residual}};
}

int cmd_solve(const Options& opt) {
  const auto cfg = load(opt);
  const tvaoi::MomentDynamics dyn(tvaoi::StateSpace(cfg.scenario.n_classes()), cfg.scenario);
  const auto sol = tvaoi::solve_pss(dyn, cfg.solver);
  std::cout << (sol.converged ? "converged" : "not converged") << " after " << sol.iterations
            << " iterations, residual "
            << tvaoi::format_number(sol.residual_history.empty() ? 0.0 : sol.residual_history.back())
            << '\n';

  const fs::path dir = output_dir(opt).value_or(fs::path("."));
  fs::create_directories(dir);
  {
    auto f = open_csv(dir, "pss_trajectory.csv");
    tvaoi::write_trajectory_csv(f, tvaoi::all_class_metrics(dyn.space(), dyn.scenario(), sol.trajectory));
  }
  {
    auto f = open_csv(dir, "residuals.csv");
    tvaoi::write_residuals_csv(f, sol.residual_history);
  }
  json m = manifest_base("solve", opt, cfg);
  add_solution(m, sol);
  write_manifest(dir, m);
  return sol.converged ? kOk : kNoConvergence;
}

int cmd_floquet(const Options& opt) {
  const auto cfg = load(opt);
  const tvaoi::MomentDynamics dyn(tvaoi::StateSpace(cfg.scenario.n_classes()), cfg.scenario);
  const auto rep = tvaoi::monodromy(dyn, cfg.solver.integration);
  std::cout << "multipliers " << rep.multipliers.size() << '\n';
  for (const auto& mult : rep.multipliers) {
    std::cout << tvaoi::format_number(mult.real()) << ' ' << tvaoi::format_number(mult.imag())
              << '\n';
  }
  std::cout << "spectral_radius " << tvaoi::format_number(rep.spectral_radius) << '\n';
  std::cout << "lower_block_residual " << tvaoi::format_number(rep.lower_block_residual) << '\n';
  if (const auto dir = output_dir(opt)) {
    fs::create_directories(*dir);
    auto f = open_csv(*dir, "floquet_multipliers.csv");
    tvaoi::write_multipliers_csv(f, rep);
    json m = manifest_base("floquet", opt, cfg);
    m["floquet"] = {{"spectral_radius", rep.spectral_radius},
                    {"lower_block_residual", rep.lower_block_residual},
                    {"n_multipliers", rep.multipliers.size()}};
    write_manifest(*dir, m);
  }
  return rep.stable ? kOk : kUnstable;
}

int cmd_simulate(const Options& opt) {
  const auto cfg = load(opt);
  const auto grid = tvaoi::sampling_grid(cfg.scenario, cfg.solver.integration, cfg.grid_bins);
  const auto paths = tvaoi::simulate_paths(cfg.scenario, cfg.mc, grid, cfg.mc.n_paths);
  const auto est = tvaoi::estimate(paths, cfg.scenario.period(), grid);
  const fs::path dir = output_dir(opt).value_or(fs::path("."));
  fs::create_directories(dir);
  {
    auto f = open_csv(dir, "mc_estimate.csv");
    tvaoi::write_mc_estimate_csv(f, est);
  }
  json m = manifest_base("simulate", opt, cfg);
  std::uint64_t events = 0;
  for (const auto& p : paths) events += p.n_events;
  m["mc"] = {{"n_paths", est.n_paths}, {"events", events}};
  write_manifest(dir, m);
  std::cout << "simulated " << est.n_paths << " paths, " << events << " events\n";
  return kOk;
}

int cmd_validate(const Options& opt) {
  const auto cfg = load(opt);
  const tvaoi::MomentDynamics dyn(tvaoi::StateSpace(cfg.scenario.n_classes()), cfg.scenario);
  const auto sol = tvaoi::solve_pss(dyn, cfg.solver);
  const auto grid = tvaoi::sampling_grid(cfg.scenario, cfg.solver.integration, cfg.grid_bins);
  tvaoi::McEstimate final_est;
  const auto rows = tvaoi::progressive_mae(dyn, sol, cfg.mc, grid, cfg.path_counts, &final_est);
  const auto ref = tvaoi::ode_reference(dyn.space(), dyn.scenario(), sol.trajectory, grid);

  const fs::path dir = output_dir(opt).value_or(fs::path("."));
  fs::create_directories(dir);
  {
    auto f = open_csv(dir, "mae_vs_paths.csv");
    tvaoi::write_mae_csv(f, rows);
  }
  {
    auto f = open_csv(dir, "overlay.csv");
    tvaoi::write_overlay_csv(f, dyn.scenario(), ref, final_est);
  }

  bool pass = true;
  const auto& last = rows.back();
  json per_class = json::array();
  for (std::size_t k = 0; k < last.mean_mae.size(); ++k) {
    const double rel = last.mean_mae[k] / last.mean_level[k];
    pass = pass && rel < cfg.mae_threshold;
    per_class.push_back({{"class", k + 1}, {"mean_aoi_mae", last.mean_mae[k]},
                         {"relative_mae", rel}, {"peak_aoi_mae", last.peak_mae[k]}});
    std::cout << "class " << k + 1 << " paths " << last.n_paths << " mean-AoI MAE "
              << tvaoi::format_number(last.mean_mae[k]) << " (relative "
              << tvaoi::format_number(rel) << "), peak-AoI MAE "
              << tvaoi::format_number(last.peak_mae[k]) << '\n';
  }
  json m = manifest_base("validate", opt, cfg);
  add_solution(m, sol);
  m["validation"] = {{"pass", pass}, {"final", per_class}};
  write_manifest(dir, m);
  if (!sol.converged) return kNoConvergence;
  return pass ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic steady-state AoI solver for a time-varying priority queue"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", opt.config, "scenario config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (default: $TVAOI_OUT_DIR or .)");
    sub->add_option("--paths", opt.paths, "Monte Carlo paths");
    sub->add_option("--seed", opt.seed, "root seed");
    sub->add_option("--steps", opt.steps, "RK4 steps per period");
  };
  auto* solve = app.add_subcommand("solve", "periodic steady state and metric trajectories");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate");
  auto* validate = app.add_subcommand("validate", "progressive ODE vs Monte Carlo comparison");
  auto* floquet = app.add_subcommand("floquet", "monodromy multipliers");
  for (auto* sub : {solve, simulate, validate, floquet}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (validate->parsed()) return cmd_validate(opt);
    return cmd_floquet(opt);
  } catch (const tvaoi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const tvaoi::NumericalError& e) {
    std::cerr << "numerical failure at t=" << e.time() << ": " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
