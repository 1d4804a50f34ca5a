#include "tvaoi/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "tvaoi/error.hpp"
#include "tvaoi/generator.hpp"
#include "tvaoi/metrics.hpp"

namespace tvaoi {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_grid(const std::vector<double>& grid, double period) {
  if (grid.empty() || grid.front() != 0.0) throw ConfigError("sampling grid must start at phase 0");
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (!(grid[j] > grid[j - 1])) throw ConfigError("sampling grid must be strictly increasing");
  }
  if (!(grid.back() < period)) throw ConfigError("sampling grid must lie in [0, T)");
}

Eigen::Index bin_of(const std::vector<double>& grid, double phase) {
  const auto it = std::upper_bound(grid.begin(), grid.end(), phase);
  return static_cast<Eigen::Index>(it - grid.begin()) - 1;
}

double phase_of(double t, double period) {
  const double ph = std::fmod(t, period);
  return ph < 0.0 ? ph + period : ph;
}

// Mean over paths with se = sd / sqrt(n).
BinStat path_mean(const std::vector<double>& v, double count) {
  BinStat out;
  const auto n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  out.value = sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - out.value) * (x - out.value);
  out.se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : kNaN;
  out.count = count;
  out.defined = true;
  return out;
}

// sum(s) / sum(c) with the delta-method se of a ratio of path totals.
BinStat ratio_estimate(const std::vector<double>& s, const std::vector<double>& c) {
  BinStat out;
  const auto n = static_cast<double>(s.size());
  double ts = 0.0, tc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    ts += s[i];
    tc += c[i];
  }
  out.count = tc;
  if (tc <= 0.0) {
    out.value = kNaN;
    out.se = kNaN;
    return out;
  }
  out.defined = true;
  out.value = ts / tc;
  if (s.size() < 2) {
    out.se = kNaN;
    return out;
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = s[i] - out.value * c[i];
    ss += r * r;
  }
  const double cbar = tc / n;
  out.se = std::sqrt(ss / (n * (n - 1.0))) / cbar;
  return out;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t path_seed(std::uint64_t root_seed, std::uint32_t trial, std::uint32_t index) noexcept {
  const std::uint64_t stream = (static_cast<std::uint64_t>(trial) << 32) | index;
  return splitmix64(root_seed ^ splitmix64(stream));
}

PathResult simulate_path(const Scenario& scenario, double horizon, double warmup,
                         std::uint64_t seed, const PathOptions& options) {
  if (!(warmup >= 0.0) || !(horizon > warmup) || !std::isfinite(horizon)) {
    throw ConfigError("simulate_path needs horizon > warmup >= 0");
  }
  const double period = scenario.period();
  const auto& grid = options.grid;
  check_grid(grid, period);

  const int n_classes = scenario.n_classes();
  const auto n_bins = static_cast<Eigen::Index>(grid.size());
  PathResult out;
  out.n_classes = n_classes;
  out.aoi_sum = Eigen::MatrixXd::Zero(n_classes, n_bins);
  out.samples = Eigen::VectorXd::Zero(n_bins);
  out.peak_sum = Eigen::MatrixXd::Zero(n_classes, n_bins);
  out.peak_count = Eigen::MatrixXd::Zero(n_classes, n_bins);
  out.arrival_count = Eigen::MatrixXd::Zero(n_classes, n_bins);

  std::optional<StateSpace> space;
  if (options.track_occupancy) {
    space.emplace(n_classes);
    out.occupancy = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space->size()));
  }

  std::vector<double> lambda_max(static_cast<std::size_t>(n_classes));
  std::vector<double> mu_max(static_cast<std::size_t>(n_classes));
  double arrival_bound = 0.0;
  for (int k = 1; k <= n_classes; ++k) {
    lambda_max[static_cast<std::size_t>(k - 1)] = scenario.arrival(k).max_rate();
    mu_max[static_cast<std::size_t>(k - 1)] = scenario.service(k).max_rate();
    arrival_bound += lambda_max[static_cast<std::size_t>(k - 1)];
  }

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  SystemState s = SystemState::idle();
  double service_gen = 0.0;
  std::vector<double> buffer_gen(static_cast<std::size_t>(n_classes), 0.0);
  std::vector<double> origin(static_cast<std::size_t>(n_classes), 0.0);

  // Sampling cursor at time cycle * T + grid[bin], first one at or after warmup.
  double cycle = std::floor(warmup / period);
  auto bin = static_cast<std::size_t>(
      std::lower_bound(grid.begin(), grid.end(), warmup - cycle * period) - grid.begin());
  if (bin == grid.size()) {
    bin = 0;
    cycle += 1.0;
  }
  double next_sample = cycle * period + grid[bin];

  double t = 0.0;
  for (;;) {
    const double service_bound = s.is_idle() ? 0.0 : mu_max[static_cast<std::size_t>(s.in_service() - 1)];
    const double bound = arrival_bound + service_bound;
    const double candidate = bound > 0.0 ? t + exp1(rng) / bound : std::numeric_limits<double>::infinity();
    const double until = std::min(candidate, horizon);

    while (next_sample < until) {
      for (int k = 0; k < n_classes; ++k) {
        out.aoi_sum(k, static_cast<Eigen::Index>(bin)) += next_sample - origin[static_cast<std::size_t>(k)];
      }
      out.samples(static_cast<Eigen::Index>(bin)) += 1.0;
      if (++bin == grid.size()) {
        bin = 0;
        cycle += 1.0;
      }
      next_sample = cycle * period + grid[bin];
    }
    if (space) {
      const double covered = until - std::max(t, warmup);
      if (covered > 0.0) out.occupancy(static_cast<Eigen::Index>(space->position(s))) += covered;
    }
    if (candidate >= horizon) break;
    t = candidate;

    // Pick the stream in proportion to its bound, then thin.
    double u = unif(rng) * bound;
    int arriving = 0;
    for (int k = 1; k <= n_classes; ++k) {
      const double lm = lambda_max[static_cast<std::size_t>(k - 1)];
      if (u < lm) {
        arriving = k;
        break;
      }
      u -= lm;
    }
    if (arriving == 0 && s.is_idle()) {
      // Only reachable through rounding in the stream pick.
      for (int k = n_classes; k >= 1; --k) {
        if (lambda_max[static_cast<std::size_t>(k - 1)] > 0.0) {
          arriving = k;
          break;
        }
      }
    }

    const bool sampling = t >= warmup;
    const Eigen::Index t_bin = bin_of(grid, phase_of(t, period));
    if (arriving != 0) {
      const double lm = lambda_max[static_cast<std::size_t>(arriving - 1)];
      if (unif(rng) * lm >= scenario.lambda(arriving, t)) continue;
      const SystemState before = s;
      EventKind kind;
      if (s.is_idle()) {
        s = arrival_target(s, arriving);
        service_gen = t;
        kind = EventKind::arrival_to_service;
      } else {
        kind = s.waiting(arriving) ? EventKind::arrival_overwrite : EventKind::arrival_to_buffer;
        s = arrival_target(s, arriving);
        buffer_gen[static_cast<std::size_t>(arriving - 1)] = t;
      }
      ++out.n_events;
      if (sampling) out.arrival_count(arriving - 1, t_bin) += 1.0;
      if (options.log_events) out.events.push_back({t, kind, arriving, before, s, t});
    } else {
      const int served = s.in_service();
      const double mm = mu_max[static_cast<std::size_t>(served - 1)];
      if (unif(rng) * mm >= scenario.mu(served, t)) continue;
      const SystemState before = s;
      auto& org = origin[static_cast<std::size_t>(served - 1)];
      const double pre_age = t - org;
      const double served_gen = service_gen;
      org = std::max(org, served_gen);
      s = completion_target(s);
      if (!s.is_idle()) service_gen = buffer_gen[static_cast<std::size_t>(s.in_service() - 1)];
      ++out.n_events;
      if (sampling) {
        out.peak_sum(served - 1, t_bin) += pre_age;
        out.peak_count(served - 1, t_bin) += 1.0;
      }
      if (options.log_events) {
        out.events.push_back({t, EventKind::completion, served, before, s, served_gen, pre_age});
      }
    }
  }
  return out;
}

void validate(const McConfig& cfg) {
  if (cfg.n_paths < 1) throw ConfigError("n_paths must be at least 1");
  if (cfg.n_trials < 1) throw ConfigError("n_trials must be at least 1");
  if (!(cfg.warmup_periods >= 0.0)) throw ConfigError("warmup_periods must be nonnegative");
  if (!(cfg.sample_periods > 0.0)) throw ConfigError("sample_periods must be positive");
}

std::vector<PathResult> simulate_paths(const Scenario& scenario, const McConfig& cfg,
                                       const std::vector<double>& grid, int n_paths,
                                       std::uint32_t trial) {
  validate(cfg);
  if (n_paths < 1) throw ConfigError("n_paths must be at least 1");
  check_grid(grid, scenario.period());
  const double warmup = cfg.warmup_periods * scenario.period();
  const double horizon = warmup + cfg.sample_periods * scenario.period();
  const PathOptions options{grid, false, false};

  std::vector<PathResult> out(static_cast<std::size_t>(n_paths));
  unsigned threads = cfg.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n_paths));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (auto i = static_cast<std::size_t>(w); i < out.size(); i += threads) {
          out[i] = simulate_path(scenario, horizon, warmup,
                                 path_seed(cfg.root_seed, trial, static_cast<std::uint32_t>(i)),
                                 options);
        }
      });
    }
  }
  return out;
}

McEstimate estimate(std::span<const PathResult> paths, double period,
                    const std::vector<double>& grid) {
  if (paths.empty()) throw InsufficientDataError("estimate needs at least one path");
  const int n_classes = paths.front().n_classes;
  const auto n_bins = static_cast<Eigen::Index>(grid.size());
  for (const auto& p : paths) {
    if (p.n_classes != n_classes || p.aoi_sum.cols() != n_bins) {
      throw ConfigError("paths do not share the class count and grid");
    }
  }

  McEstimate est;
  est.period = period;
  est.grid = grid;
  est.n_paths = static_cast<int>(paths.size());
  const std::size_t n = paths.size();
  std::vector<double> v(n), c(n);
  for (int k = 0; k < n_classes; ++k) {
    std::vector<BinStat> mean_row, peak_row;
    for (Eigen::Index j = 0; j < n_bins; ++j) {
      double count = 0.0;
      bool sampled = true;
      for (std::size_t i = 0; i < n; ++i) {
        const double m = paths[i].samples(j);
        sampled = sampled && m > 0.0;
        v[i] = m > 0.0 ? paths[i].aoi_sum(k, j) / m : 0.0;
        count += m;
      }
      mean_row.push_back(sampled ? path_mean(v, count) : BinStat{kNaN, kNaN, count, false});
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = paths[i].peak_sum(k, j);
        c[i] = paths[i].peak_count(k, j);
      }
      peak_row.push_back(ratio_estimate(v, c));
    }
    est.mean_aoi.push_back(std::move(mean_row));
    est.peak_aoi.push_back(std::move(peak_row));

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = paths[i].samples.sum();
      v[i] = m > 0.0 ? paths[i].aoi_sum.row(k).sum() / m : 0.0;
      total += m;
    }
    est.pooled_mean_aoi.push_back(total > 0.0 ? path_mean(v, total) : BinStat{kNaN, kNaN, 0.0, false});
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = paths[i].peak_sum.row(k).sum();
      c[i] = paths[i].peak_count.row(k).sum();
    }
    est.pooled_peak_aoi.push_back(ratio_estimate(v, c));
  }
  return est;
}

OdeReference ode_reference(const StateSpace& space, const Scenario& scenario,
                           const Trajectory& trajectory, const std::vector<double>& grid) {
  const double period = scenario.period();
  check_grid(grid, period);
  const auto& times = trajectory.times;
  if (times.size() < 2) throw ConfigError("trajectory too short for an ODE reference");
  const double t0 = times.front();
  const double tol = 1e-9 * period;
  if (std::abs(times.back() - t0 - period) > tol) {
    throw ConfigError("trajectory must span exactly one period");
  }

  std::vector<std::size_t> at;
  for (double g : grid) {
    const auto it = std::lower_bound(times.begin(), times.end(), t0 + g - tol);
    if (it == times.end() || std::abs(*it - t0 - g) > tol) {
      throw ConfigError("MC grid phase " + std::to_string(g) + " is not an ODE grid point");
    }
    at.push_back(static_cast<std::size_t>(it - times.begin()));
  }
  at.push_back(times.size() - 1);

  const IndicatorVectors ind = indicators(space);
  OdeReference ref;
  ref.grid = grid;
  for (int k = 1; k <= space.n_classes(); ++k) {
    const auto& serving = ind.serving_class(k);
    std::vector<double> mean;
    std::vector<std::optional<double>> peak;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      mean.push_back(mean_aoi(trajectory.states[at[j]].a(k)));
      double num = 0.0, den = 0.0;
      for (std::size_t i = at[j]; i < at[j + 1]; ++i) {
        const double h = times[i + 1] - times[i];
        const double mu_l = scenario.mu(k, times[i], Side::right);
        const double mu_r = scenario.mu(k, times[i + 1], Side::left);
        const auto& xl = trajectory.states[i];
        const auto& xr = trajectory.states[i + 1];
        num += 0.5 * h * (mu_l * xl.a(k).dot(serving.transpose()) + mu_r * xr.a(k).dot(serving.transpose()));
        den += 0.5 * h * (mu_l * xl.p().dot(serving.transpose()) + mu_r * xr.p().dot(serving.transpose()));
      }
      const double width = times[at[j + 1]] - times[at[j]];
      peak.push_back(den >= kUndefinedThreshold * width ? std::optional(num / den) : std::nullopt);
    }
    ref.mean_aoi.push_back(std::move(mean));
    ref.peak_aoi.push_back(std::move(peak));
  }
  return ref;
}

ValidationReport validate(const OdeReference& ode, const McEstimate& mc) {
  const double tol = 1e-9 * std::max(1.0, mc.period);
  if (ode.grid.size() != mc.grid.size()) throw ConfigError("ODE and MC grids differ in size");
  for (std::size_t j = 0; j < ode.grid.size(); ++j) {
    if (std::abs(ode.grid[j] - mc.grid[j]) > tol) throw ConfigError("ODE and MC grids differ");
  }
  if (ode.mean_aoi.size() != mc.mean_aoi.size()) throw ConfigError("ODE and MC class counts differ");

  ValidationReport rep;
  rep.n_paths = mc.n_paths;
  for (std::size_t k = 0; k < ode.mean_aoi.size(); ++k) {
    ClassValidation cv;
    cv.class_index = static_cast<int>(k + 1);
    double abs_sum = 0.0, level = 0.0;
    int used = 0, covered = 0;
    for (std::size_t j = 0; j < ode.grid.size(); ++j) {
      level += ode.mean_aoi[k][j];
      const BinStat& b = mc.mean_aoi[k][j];
      if (!b.defined) continue;
      const double diff = std::abs(ode.mean_aoi[k][j] - b.value);
      abs_sum += diff;
      ++used;
      if (diff <= 3.0 * b.se) ++covered;
    }
    cv.mean_mae = used > 0 ? abs_sum / used : kNaN;
    cv.mean_within_3se = used > 0 ? static_cast<double>(covered) / used : kNaN;
    cv.mean_level = level / static_cast<double>(ode.grid.size());

    abs_sum = 0.0;
    for (std::size_t j = 0; j < ode.grid.size(); ++j) {
      const BinStat& b = mc.peak_aoi[k][j];
      if (!b.defined || !ode.peak_aoi[k][j]) {
        ++cv.peak_bins_excluded;
        continue;
      }
      abs_sum += std::abs(*ode.peak_aoi[k][j] - b.value);
      ++cv.peak_bins_used;
    }
    cv.peak_mae = cv.peak_bins_used > 0 ? abs_sum / cv.peak_bins_used : kNaN;
    rep.classes.push_back(cv);
  }
  return rep;
}

ValidationReport validate(const MomentDynamics& dynamics, const PssSolution& pss,
                          const McEstimate& mc) {
  return validate(ode_reference(dynamics.space(), dynamics.scenario(), pss.trajectory, mc.grid), mc);
}

std::vector<MaeRow> progressive_mae(const MomentDynamics& dynamics, const PssSolution& pss,
                                    const McConfig& cfg, const std::vector<double>& grid,
                                    std::vector<int> path_counts, McEstimate* final_estimate) {
  validate(cfg);
  if (path_counts.empty()) throw ConfigError("path_counts must not be empty");
  std::sort(path_counts.begin(), path_counts.end());
  path_counts.erase(std::unique(path_counts.begin(), path_counts.end()), path_counts.end());
  if (path_counts.front() < 1) throw ConfigError("path counts must be positive");

  const Scenario& scenario = dynamics.scenario();
  const OdeReference ref = ode_reference(dynamics.space(), scenario, pss.trajectory, grid);
  const auto n_classes = static_cast<std::size_t>(scenario.n_classes());

  std::vector<MaeRow> rows;
  for (int count : path_counts) {
    rows.push_back({count, std::vector<double>(n_classes, 0.0), std::vector<double>(n_classes, 0.0),
                    std::vector<double>(n_classes, 0.0)});
  }
  for (int trial = 0; trial < cfg.n_trials; ++trial) {
    const auto paths =
        simulate_paths(scenario, cfg, grid, path_counts.back(), static_cast<std::uint32_t>(trial));
    for (auto& row : rows) {
      const auto est = estimate(std::span(paths).first(static_cast<std::size_t>(row.n_paths)),
                                scenario.period(), grid);
      const auto rep = validate(ref, est);
      if (final_estimate && row.n_paths == path_counts.back()) *final_estimate = est;
      for (std::size_t k = 0; k < n_classes; ++k) {
        row.mean_mae[k] += rep.classes[k].mean_mae / cfg.n_trials;
        row.peak_mae[k] += rep.classes[k].peak_mae / cfg.n_trials;
        row.mean_level[k] = rep.classes[k].mean_level;
      }
    }
  }
  return rows;
}

std::vector<double> subsample_grid(const Trajectory& trajectory, double period, int stride) {
  if (stride < 1) throw ConfigError("grid stride must be at least 1");
  std::vector<double> out;
  const double t0 = trajectory.times.at(0);
  for (std::size_t i = 0; i < trajectory.times.size(); i += static_cast<std::size_t>(stride)) {
    const double phase = trajectory.times[i] - t0;
    if (phase >= period - 1e-9 * period) break;
    out.push_back(phase);
  }
  return out;
}

std::vector<double> sampling_grid(const Scenario& scenario, const IntegrationConfig& cfg, int bins) {
  if (bins < 1) throw ConfigError("grid_bins must be at least 1");
  Trajectory grid_only;
  grid_only.times = make_time_grid(scenario, 0.0, scenario.period(), cfg);
  const int steps = static_cast<int>(grid_only.times.size()) - 1;
  return subsample_grid(grid_only, scenario.period(), std::max(1, steps / bins));
}

}  // namespace tvaoi
