#include "tvaoi/metrics.hpp"

namespace tvaoi {
namespace {

double masked(VectorRef v, const Eigen::RowVectorXd& mask) { return v.dot(mask.transpose()); }

}  // namespace

double mean_aoi(VectorRef a) { return a.sum(); }

std::optional<double> peak_aoi(VectorRef a, VectorRef p, const Eigen::RowVectorXd& serving,
                               double threshold) {
  const double den = masked(p, serving);
  if (den < threshold) return std::nullopt;
  return masked(a, serving) / den;
}

double service_prob(VectorRef p, const Eigen::RowVectorXd& serving) { return masked(p, serving); }

std::optional<double> unserved_age(VectorRef a, VectorRef p, const Eigen::RowVectorXd& serving,
                                   double threshold) {
  const double den = p.sum() - masked(p, serving);
  if (den < threshold) return std::nullopt;
  return (a.sum() - masked(a, serving)) / den;
}

std::optional<Gap> gap(double mean, std::optional<double> peak, std::optional<double> unserved,
                       double service_probability) {
  if (!peak || !unserved) return std::nullopt;
  return Gap{*peak - mean, (1.0 - service_probability) * (*peak - *unserved)};
}

ClassMetrics class_metrics(const StateSpace& space, const Scenario& scenario,
                           const Trajectory& trajectory, int k, double threshold) {
  const IndicatorVectors ind = indicators(space);
  const auto& serving = ind.serving_class(k);
  ClassMetrics m;
  m.class_index = k;
  m.times = trajectory.times;
  const std::size_t n = trajectory.states.size();
  m.mean_aoi.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const MomentStack& x = trajectory.states[i];
    const bool can_complete = scenario.mu(k, trajectory.times[i]) > 0.0;
    const double mean = mean_aoi(x.a(k));
    const double pi = service_prob(x.p(), serving);
    const auto peak =
        can_complete ? peak_aoi(x.a(k), x.p(), serving, threshold) : std::optional<double>{};
    const auto unserved = unserved_age(x.a(k), x.p(), serving, threshold);
    const auto g = gap(mean, peak, unserved, pi);
    m.mean_aoi.push_back(mean);
    m.service_prob.push_back(pi);
    m.peak_aoi.push_back(peak);
    m.unserved_age.push_back(unserved);
    m.gap_lhs.push_back(g ? std::optional(g->lhs) : std::nullopt);
    m.gap_rhs.push_back(g ? std::optional(g->rhs) : std::nullopt);
  }
  return m;
}

std::vector<ClassMetrics> all_class_metrics(const StateSpace& space, const Scenario& scenario,
                                            const Trajectory& trajectory, double threshold) {
  std::vector<ClassMetrics> out;
  for (int k = 1; k <= space.n_classes(); ++k) {
    out.push_back(class_metrics(space, scenario, trajectory, k, threshold));
  }
  return out;
}

}  // namespace tvaoi
