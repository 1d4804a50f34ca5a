#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "tvaoi/generator.hpp"
#include "tvaoi/rates.hpp"
#include "tvaoi/state_space.hpp"

namespace tvaoi {

/// Stacked moment vector [a_1 .. a_N, y, z_1 .. z_N, p], each block of
/// length |Q|. a_k holds the state-conditioned monitor-age mass of class k,
/// y the in-service packet age mass, z_k the waiting age mass of class k and
/// p the state probabilities.
class MomentStack {
 public:
  MomentStack(int n_classes, std::size_t n_states);
  MomentStack(int n_classes, std::size_t n_states, Eigen::VectorXd data);

  /// Idle-state probability one and all moments zero.
  static MomentStack idle_start(const StateSpace& space);
  /// Uniform probabilities over all states and all moments zero.
  static MomentStack uniform_start(const StateSpace& space);

  int n_classes() const noexcept { return n_classes_; }
  std::size_t n_states() const noexcept { return n_states_; }
  Eigen::Index dimension() const noexcept { return data_.size(); }

  Eigen::VectorXd& data() noexcept { return data_; }
  const Eigen::VectorXd& data() const noexcept { return data_; }

  auto a(int k) { return data_.segment(block(k - 1), len()); }
  auto a(int k) const { return data_.segment(block(k - 1), len()); }
  auto y() { return data_.segment(block(n_classes_), len()); }
  auto y() const { return data_.segment(block(n_classes_), len()); }
  auto z(int k) { return data_.segment(block(n_classes_ + k), len()); }
  auto z(int k) const { return data_.segment(block(n_classes_ + k), len()); }
  auto p() { return data_.segment(block(2 * n_classes_ + 1), len()); }
  auto p() const { return data_.segment(block(2 * n_classes_ + 1), len()); }

 private:
  Eigen::Index len() const { return static_cast<Eigen::Index>(n_states_); }
  Eigen::Index block(int b) const { return static_cast<Eigen::Index>(b) * len(); }

  int n_classes_;
  std::size_t n_states_;
  Eigen::VectorXd data_;
};

/// Right-hand side of the closed moment system plus the forward Kolmogorov
/// equation for p:
///   a_k' = p + a_k Q + (y - a_k) M_class[k]
///   y'   = p.*busy + y Q + (z_next - y) M_comp,  z_next = sum_k z_k .* next_is[k]
///   z_k' = p.*waiting[k] + z_k Q - lambda_k z_k.*waiting[k] - z_k M_next[k]
///   p'   = p Q
/// The products are evaluated from the sparse transition structure of the
/// state space; they equal the dense products with build_generator().
class MomentDynamics {
 public:
  MomentDynamics(StateSpace space, Scenario scenario);

  const StateSpace& space() const noexcept { return space_; }
  const Scenario& scenario() const noexcept { return scenario_; }
  Eigen::Index dimension() const noexcept {
    return static_cast<Eigen::Index>((2 * space_.n_classes() + 2) * space_.size());
  }

  /// dx = f(t, x). Throws std::logic_error on a dimension mismatch.
  void derivative(double t, Side side, const Eigen::VectorXd& x, Eigen::VectorXd& dx) const;
  MomentStack derivative(double t, const MomentStack& x, Side side = Side::right) const;

 private:
  StateSpace space_;
  Scenario scenario_;
  // Arrival edges that change the state, flattened per source position.
  std::vector<std::size_t> edge_offset_;
  std::vector<int> edge_class_;
  std::vector<std::size_t> edge_target_;
};

struct IntegrationConfig {
  /// Fixed RK4 steps per period; breakpoints of the rate profiles are always
  /// grid points. Must be at least 100.
  int steps_per_period = 2000;
};

void validate(const IntegrationConfig& cfg);

/// Grid on [t0, t1] that contains every profile breakpoint and uses
/// round((t1 - t0) / T * steps_per_period) steps in total.
std::vector<double> make_time_grid(const Scenario& scenario, double t0, double t1,
                                   const IntegrationConfig& cfg);

/// Stack samples at every grid point, including both ends.
struct Trajectory {
  std::vector<double> times;
  std::vector<MomentStack> states;
};

/// Classical fourth-order Runge-Kutta on the fixed grid. Deterministic for a
/// given configuration. Throws NumericalError with the step end time when the
/// state stops being finite, ConfigError when t1 <= t0.
MomentStack integrate(const MomentDynamics& dynamics, const MomentStack& x0, double t0, double t1,
                      const IntegrationConfig& cfg, Trajectory* samples = nullptr);

}  // namespace tvaoi
