#include "tvaoi/generator.hpp"

namespace tvaoi {

RateSample sample_rates(const Scenario& scenario, double t, Side side) {
  RateSample r;
  const int n = scenario.n_classes();
  r.lambda.resize(static_cast<std::size_t>(n));
  r.mu.resize(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    r.lambda[static_cast<std::size_t>(k - 1)] = scenario.lambda(k, t, side);
    r.mu[static_cast<std::size_t>(k - 1)] = scenario.mu(k, t, side);
  }
  return r;
}

GeneratorSet build_generator(const StateSpace& space, const RateSample& rates, double t) {
  const auto n = static_cast<Eigen::Index>(space.size());
  const int n_classes = space.n_classes();

  GeneratorSet g;
  g.t = t;
  g.Q = Eigen::MatrixXd::Zero(n, n);
  g.M_comp = Eigen::MatrixXd::Zero(n, n);
  g.M_class.assign(static_cast<std::size_t>(n_classes), Eigen::MatrixXd::Zero(n, n));
  g.M_next.assign(static_cast<std::size_t>(n_classes), Eigen::MatrixXd::Zero(n, n));

  for (std::size_t pos = 0; pos < space.size(); ++pos) {
    const auto row = static_cast<Eigen::Index>(pos);
    for (int k = 1; k <= n_classes; ++k) {
      const std::size_t target = space.arrival_target_at(pos, k);
      if (target != pos) g.Q(row, static_cast<Eigen::Index>(target)) += rates.lambda[static_cast<std::size_t>(k - 1)];
    }
    const int j = space[pos].in_service();
    if (j == 0) continue;
    const auto col = static_cast<Eigen::Index>(space.completion_target_at(pos));
    const double mu = rates.mu[static_cast<std::size_t>(j - 1)];
    g.Q(row, col) += mu;
    g.M_comp(row, col) = mu;
    g.M_class[static_cast<std::size_t>(j - 1)](row, col) = mu;
    if (const int next = space.next_at(pos); next != 0) {
      g.M_next[static_cast<std::size_t>(next - 1)](row, col) = mu;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) g.Q(i, i) = -g.Q.row(i).sum();
  return g;
}

GeneratorSet build_generator(const StateSpace& space, const Scenario& scenario, double t, Side side) {
  return build_generator(space, sample_rates(scenario, t, side), t);
}

IndicatorVectors indicators(const StateSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.size());
  const auto n_classes = static_cast<std::size_t>(space.n_classes());
  IndicatorVectors d;
  d.busy = Eigen::RowVectorXd::Zero(n);
  d.serving.assign(n_classes, Eigen::RowVectorXd::Zero(n));
  d.waiting.assign(n_classes, Eigen::RowVectorXd::Zero(n));
  d.next_is.assign(n_classes, Eigen::RowVectorXd::Zero(n));
  for (std::size_t pos = 0; pos < space.size(); ++pos) {
    const auto i = static_cast<Eigen::Index>(pos);
    const SystemState& s = space[pos];
    if (!s.is_idle()) {
      d.busy(i) = 1.0;
      d.serving[static_cast<std::size_t>(s.in_service() - 1)](i) = 1.0;
    }
    for (std::size_t k = 1; k <= n_classes; ++k) {
      if (s.waiting(static_cast<int>(k))) d.waiting[k - 1](i) = 1.0;
    }
    if (const int next = space.next_at(pos); next != 0) d.next_is[static_cast<std::size_t>(next - 1)](i) = 1.0;
  }
  return d;
}

ReducedGenerator reduce(const GeneratorSet& generators) {
  const Eigen::MatrixXd& Q = generators.Q;
  const Eigen::Index m = Q.rows() - 1;
  // T*Q subtracts the last row from every other row; *E drops the last column.
  ReducedGenerator r;
  r.Q_red = Q.topLeftCorner(m, m) - Eigen::VectorXd::Ones(m) * Q.row(m).head(m);
  r.beta = Q.row(m).head(m);
  return r;
}

}  // namespace tvaoi
