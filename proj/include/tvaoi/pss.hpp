#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "tvaoi/ode.hpp"

namespace tvaoi {

struct PssConfig {
  double epsilon = 1e-10;  ///< relative residual tolerance
  int max_iters = 500;
  double alpha = 1.0;  ///< relaxation in (0, 1]
  IntegrationConfig integration;
};

void validate(const PssConfig& cfg);

struct PssSolution {
  MomentStack x_star_0;
  Trajectory trajectory;  ///< one period from x_star_0 on the integration grid
  std::vector<double> residual_history;
  bool converged = false;
  int iterations = 0;
  /// ||x(T) - x(0)|| / (1 + ||x(0)||) along the stored trajectory.
  double periodicity_residual = 0.0;
};

/// Integrates one period starting at t = 0.
MomentStack one_period_map(const MomentDynamics& dynamics, const MomentStack& x0,
                           const IntegrationConfig& cfg);

/// Rescales the probability block to unit sum; other blocks are untouched.
/// Throws NumericalError when the probabilities do not sum to a positive value.
MomentStack renormalize(MomentStack x);

/// ||next - current|| / (1 + ||current||) in the Euclidean norm.
double relative_residual(const MomentStack& next, const MomentStack& current);

/// Relaxed fixed-point iteration for the periodic steady state:
///   x <- (1 - alpha) x + alpha renormalize(F(x))
/// from `initial` (idle-state point mass when absent) until the relative
/// residual drops to epsilon or max_iters iterations ran. Non-convergence is
/// reported through `converged`, not thrown.
PssSolution solve_pss(const MomentDynamics& dynamics, const PssConfig& cfg,
                      std::optional<MomentStack> initial = std::nullopt);

struct FloquetReport {
  std::vector<std::complex<double>> multipliers;
  double spectral_radius = 0.0;
  bool stable = false;  ///< spectral_radius < 1
  /// Largest magnitude below the diagonal blocks of the monodromy matrix.
  double lower_block_residual = 0.0;
  /// Sizes of the diagonal blocks: 2N+1 blocks of |Q| and one of |Q|-1.
  std::vector<Eigen::Index> block_sizes;
  Eigen::MatrixXd monodromy;
};

/// Homogeneous coefficient matrix A(t) of the compact system
/// x = [a_1 .. a_N, y, z_1 .. z_N, p_red] (column form), with p_red the
/// first |Q|-1 probabilities. Block upper triangular.
Eigen::MatrixXd compact_coefficient(const StateSpace& space, const IndicatorVectors& ind,
                                    const GeneratorSet& gen, const RateSample& rates);

/// Integrates Phi' = A(t) Phi, Phi(0) = I over one period on the solver grid
/// and returns the eigenvalues of Phi(T). Column blocks are integrated on up
/// to `threads` workers (0 picks the hardware concurrency).
FloquetReport monodromy(const MomentDynamics& dynamics, const IntegrationConfig& cfg,
                        unsigned threads = 0);

/// Geometric ratio exp(slope) of a least-squares line through log residuals.
/// Throws InsufficientDataError for fewer than five values.
double contraction_rate(std::span<const double> residuals);

}  // namespace tvaoi
