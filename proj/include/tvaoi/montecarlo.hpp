#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tvaoi/ode.hpp"
#include "tvaoi/pss.hpp"
#include "tvaoi/rates.hpp"
#include "tvaoi/state_space.hpp"

namespace tvaoi {

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of path `index` in trial `trial`:
///   splitmix64(root ^ splitmix64((trial << 32) | index)).
std::uint64_t path_seed(std::uint64_t root_seed, std::uint32_t trial, std::uint32_t index) noexcept;

enum class EventKind { arrival_to_service, arrival_to_buffer, arrival_overwrite, completion };

struct EventRecord {
  double time;
  EventKind kind;
  int class_index;        ///< arriving class, or the class that completed
  SystemState before;
  SystemState after;
  double generation_time; ///< arriving packet, or the packet that completed
  double pre_completion_age = 0.0;  ///< completions only
};

struct PathOptions {
  /// Sampling phases in [0, T), strictly increasing, first entry 0. Peak
  /// ages go to the bin [grid[j], grid[j+1]) (last bin ends at T).
  std::vector<double> grid;
  bool log_events = false;
  bool track_occupancy = false;
};

/// Per-path sums over the sampling window [warmup, horizon).
struct PathResult {
  int n_classes = 0;
  Eigen::MatrixXd aoi_sum;        ///< classes x bins, AoI summed over sampled periods
  Eigen::VectorXd samples;        ///< per bin, number of AoI samples
  Eigen::MatrixXd peak_sum;       ///< classes x bins, pre-completion ages
  Eigen::MatrixXd peak_count;     ///< classes x bins, completions
  Eigen::MatrixXd arrival_count;  ///< classes x bins, accepted arrivals
  Eigen::VectorXd occupancy;      ///< time per state position (track_occupancy)
  std::vector<EventRecord> events;  ///< whole path, including warmup (log_events)
  std::uint64_t n_events = 0;     ///< accepted arrivals and completions, whole path
};

/// One sample path from the empty idle system with all monitor origins 0 at
/// t = 0. Arrivals and completions are drawn by thinning the superposition of
/// the per-class arrival streams and the in-service completion stream against
/// their max rates. Throws ConfigError unless horizon > warmup >= 0 and the
/// grid is valid.
PathResult simulate_path(const Scenario& scenario, double horizon, double warmup,
                         std::uint64_t seed, const PathOptions& options);

struct McConfig {
  int n_paths = 1000;
  int n_trials = 1;
  double warmup_periods = 20.0;
  double sample_periods = 10.0;  ///< periods sampled per path after warmup
  std::uint64_t root_seed = 20240601;
  unsigned threads = 0;          ///< 0 picks the hardware concurrency
};

void validate(const McConfig& cfg);

/// Paths 0 .. n_paths-1 of one trial, aggregated in path order.
std::vector<PathResult> simulate_paths(const Scenario& scenario, const McConfig& cfg,
                                       const std::vector<double>& grid, int n_paths,
                                       std::uint32_t trial = 0);

struct BinStat {
  double value = 0.0;
  double se = 0.0;          ///< NaN with fewer than two paths
  double count = 0.0;       ///< samples (mean AoI) or completions (peak AoI)
  bool defined = false;
};

struct McEstimate {
  double period = 0.0;
  std::vector<double> grid;
  std::vector<std::vector<BinStat>> mean_aoi;  ///< [class-1][bin], value at the bin phase
  std::vector<std::vector<BinStat>> peak_aoi;  ///< [class-1][bin], completions in the bin
  std::vector<BinStat> pooled_mean_aoi;        ///< per class, time average over the period
  std::vector<BinStat> pooled_peak_aoi;        ///< per class, all completions
  int n_paths = 0;
  int n_trials = 1;
};

/// Across-path means with standard errors. Mean AoI: per-path averages,
/// se = sd / sqrt(n). Peak AoI: ratio estimator sum(ages) / sum(completions)
/// with the delta-method se. Bins without completions stay undefined.
/// Throws InsufficientDataError on an empty span.
McEstimate estimate(std::span<const PathResult> paths, double period, const std::vector<double>& grid);

/// ODE curves on the MC grid: mean AoI at each phase, and the
/// completion-weighted peak AoI over each bin,
///   int a_k.d_{J=k} mu_k dt / int p.d_{J=k} mu_k dt,
/// undefined where the completion mass is below the metric threshold.
struct OdeReference {
  std::vector<double> grid;
  std::vector<std::vector<double>> mean_aoi;
  std::vector<std::vector<std::optional<double>>> peak_aoi;
};

/// Throws ConfigError when a grid phase is not a trajectory time.
OdeReference ode_reference(const StateSpace& space, const Scenario& scenario,
                           const Trajectory& trajectory, const std::vector<double>& grid);

struct ClassValidation {
  int class_index = 0;
  double mean_mae = 0.0;
  double mean_level = 0.0;      ///< average ODE mean AoI over the grid
  double mean_within_3se = 0.0; ///< fraction of phases with |ode - mc| <= 3 se
  double peak_mae = 0.0;        ///< NaN when no bin is defined on both sides
  int peak_bins_used = 0;
  int peak_bins_excluded = 0;
};

struct ValidationReport {
  int n_paths = 0;
  std::vector<ClassValidation> classes;
};

/// Throws ConfigError on a grid mismatch.
ValidationReport validate(const OdeReference& ode, const McEstimate& mc);
ValidationReport validate(const MomentDynamics& dynamics, const PssSolution& pss,
                          const McEstimate& mc);

struct MaeRow {
  int n_paths = 0;
  std::vector<double> mean_mae;  ///< per class, averaged over trials
  std::vector<double> peak_mae;
  std::vector<double> mean_level;
};

/// Progressive validation with nested paths: every trial simulates
/// max(path_counts) paths and the estimate for count n uses its first n.
/// Rows come back in increasing path count. Throws ConfigError on an empty
/// or non-positive count list. `final_estimate` receives the estimate of the
/// largest count in the last trial.
std::vector<MaeRow> progressive_mae(const MomentDynamics& dynamics, const PssSolution& pss,
                                    const McConfig& cfg, const std::vector<double>& grid,
                                    std::vector<int> path_counts,
                                    McEstimate* final_estimate = nullptr);

/// Every `stride`-th point of the first period of a trajectory, as phases in
/// [0, T). Throws ConfigError when stride < 1.
std::vector<double> subsample_grid(const Trajectory& trajectory, double period, int stride);

/// About `bins` phases taken from the solver grid of one period, so MC bins
/// line up with ODE grid points.
std::vector<double> sampling_grid(const Scenario& scenario, const IntegrationConfig& cfg, int bins);

}  // namespace tvaoi
