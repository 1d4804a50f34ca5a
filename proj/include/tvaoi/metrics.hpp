#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "tvaoi/generator.hpp"
#include "tvaoi/ode.hpp"

namespace tvaoi {

/// Probability mass below which conditional metrics are reported undefined.
inline constexpr double kUndefinedThreshold = 1e-9;

using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// Mean AoI: total mass of the class moment vector.
double mean_aoi(VectorRef a);

/// Completion-conditioned mean peak AoI: (a . d_serving) / (p . d_serving).
std::optional<double> peak_aoi(VectorRef a, VectorRef p, const Eigen::RowVectorXd& serving,
                               double threshold = kUndefinedThreshold);

/// Probability that the class is in service.
double service_prob(VectorRef p, const Eigen::RowVectorXd& serving);

/// Mean AoI conditioned on the class not being in service.
std::optional<double> unserved_age(VectorRef a, VectorRef p, const Eigen::RowVectorXd& serving,
                                   double threshold = kUndefinedThreshold);

struct Gap {
  double lhs;  ///< peak - mean
  double rhs;  ///< (1 - pi) (peak - unserved)
};

std::optional<Gap> gap(double mean, std::optional<double> peak, std::optional<double> unserved,
                       double service_probability);

/// Per-class metric series along a trajectory, one entry per grid point.
/// Peak AoI (and with it the gap) is undefined wherever a class-k
/// completion is impossible: mu_k(t) == 0 or negligible service probability.
struct ClassMetrics {
  int class_index = 0;
  std::vector<double> times;
  std::vector<double> mean_aoi;
  std::vector<std::optional<double>> peak_aoi;
  std::vector<double> service_prob;
  std::vector<std::optional<double>> unserved_age;
  std::vector<std::optional<double>> gap_lhs;
  std::vector<std::optional<double>> gap_rhs;
};

ClassMetrics class_metrics(const StateSpace& space, const Scenario& scenario,
                           const Trajectory& trajectory, int k,
                           double threshold = kUndefinedThreshold);

std::vector<ClassMetrics> all_class_metrics(const StateSpace& space, const Scenario& scenario,
                                            const Trajectory& trajectory,
                                            double threshold = kUndefinedThreshold);

}  // namespace tvaoi
