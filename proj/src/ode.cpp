#include "tvaoi/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tvaoi/detail/rk4.hpp"
#include "tvaoi/error.hpp"

namespace tvaoi {

MomentStack::MomentStack(int n_classes, std::size_t n_states)
    : n_classes_(n_classes),
      n_states_(n_states),
      data_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>((2 * n_classes + 2) * n_states))) {}

MomentStack::MomentStack(int n_classes, std::size_t n_states, Eigen::VectorXd data)
    : n_classes_(n_classes), n_states_(n_states), data_(std::move(data)) {
  if (data_.size() != static_cast<Eigen::Index>((2 * n_classes + 2) * n_states)) {
    throw std::logic_error("MomentStack: data length does not match (2N+2)|Q|");
  }
}

MomentStack MomentStack::idle_start(const StateSpace& space) {
  MomentStack x(space.n_classes(), space.size());
  x.p()(0) = 1.0;
  return x;
}

MomentStack MomentStack::uniform_start(const StateSpace& space) {
  MomentStack x(space.n_classes(), space.size());
  x.p().setConstant(1.0 / static_cast<double>(space.size()));
  return x;
}

MomentDynamics::MomentDynamics(StateSpace space, Scenario scenario)
    : space_(std::move(space)), scenario_(std::move(scenario)) {
  if (space_.n_classes() != scenario_.n_classes()) {
    throw ConfigError("state space and scenario disagree on the class count");
  }
  edge_offset_.reserve(space_.size() + 1);
  edge_offset_.push_back(0);
  for (std::size_t pos = 0; pos < space_.size(); ++pos) {
    for (int k = 1; k <= space_.n_classes(); ++k) {
      const std::size_t target = space_.arrival_target_at(pos, k);
      if (target == pos) continue;
      edge_class_.push_back(k);
      edge_target_.push_back(target);
    }
    edge_offset_.push_back(edge_target_.size());
  }
}

void MomentDynamics::derivative(double t, Side side, const Eigen::VectorXd& x,
                                Eigen::VectorXd& dx) const {
  if (x.size() != dimension()) throw std::logic_error("MomentDynamics: state dimension mismatch");
  const int n_classes = space_.n_classes();
  const auto n = static_cast<Eigen::Index>(space_.size());
  const RateSample rates = sample_rates(scenario_, t, side);
  auto lambda = [&](int k) { return rates.lambda[static_cast<std::size_t>(k - 1)]; };
  auto mu = [&](int k) { return rates.mu[static_cast<std::size_t>(k - 1)]; };

  const Eigen::Index n_blocks = 2 * n_classes + 2;
  const Eigen::Index y_block = n_classes;
  const Eigen::Index p_block = 2 * n_classes + 1;
  auto at = [n](Eigen::Index block, Eigen::Index s) { return block * n + s; };

  dx.setZero(x.size());
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto pos = static_cast<std::size_t>(s);
    const SystemState& state = space_[pos];
    const int j = state.in_service();
    const double ps = x(at(p_block, s));

    // Transport along arrivals (v Q, off-diagonal and diagonal parts).
    double exit = 0.0;
    for (std::size_t e = edge_offset_[pos]; e < edge_offset_[pos + 1]; ++e) {
      const double rate = lambda(edge_class_[e]);
      exit += rate;
      const auto target = static_cast<Eigen::Index>(edge_target_[e]);
      for (Eigen::Index b = 0; b < n_blocks; ++b) dx(at(b, target)) += rate * x(at(b, s));
    }

    // Unit-rate ageing.
    for (int k = 1; k <= n_classes; ++k) {
      dx(at(k - 1, s)) += ps;
      if (state.waiting(k)) {
        dx(at(y_block + k, s)) += ps;
        dx(at(y_block + k, s)) -= lambda(k) * x(at(y_block + k, s));
      }
    }
    if (j != 0) dx(at(y_block, s)) += ps;

    if (j != 0) {
      const double rate = mu(j);
      exit += rate;
      const auto dest = static_cast<Eigen::Index>(space_.completion_target_at(pos));
      const int next = space_.next_at(pos);
      const double ys = x(at(y_block, s));
      for (Eigen::Index b = 0; b < n_blocks; ++b) dx(at(b, dest)) += rate * x(at(b, s));
      // Class-j monitor age resets to the served packet's age.
      dx(at(j - 1, dest)) += rate * (ys - x(at(j - 1, s)));
      // The in-service age restarts from the waiting age of the selected class.
      const double z_next = next != 0 ? x(at(y_block + next, s)) : 0.0;
      dx(at(y_block, dest)) += rate * (z_next - ys);
      if (next != 0) dx(at(y_block + next, dest)) -= rate * x(at(y_block + next, s));
    }
    for (Eigen::Index b = 0; b < n_blocks; ++b) dx(at(b, s)) -= exit * x(at(b, s));
  }
}

MomentStack MomentDynamics::derivative(double t, const MomentStack& x, Side side) const {
  Eigen::VectorXd dx;
  derivative(t, side, x.data(), dx);
  return {x.n_classes(), x.n_states(), std::move(dx)};
}

void validate(const IntegrationConfig& cfg) {
  if (cfg.steps_per_period < 100) {
    throw ConfigError("steps_per_period must be at least 100, got " +
                      std::to_string(cfg.steps_per_period));
  }
}

std::vector<double> make_time_grid(const Scenario& scenario, double t0, double t1,
                                   const IntegrationConfig& cfg) {
  validate(cfg);
  if (!(t1 > t0)) throw ConfigError("integration span must satisfy t1 > t0");
  const double period = scenario.period();
  const double span = t1 - t0;
  const double tol = 1e-12 * std::max(period, std::abs(t1));

  std::vector<double> knots{t0};
  const auto bps = scenario.breakpoints();
  for (double base = std::floor(t0 / period) * period; base < t1; base += period) {
    for (double b : bps) {
      const double k = base + b;
      if (k > t0 + tol && k < t1 - tol) knots.push_back(k);
    }
  }
  knots.push_back(t1);
  std::sort(knots.begin(), knots.end());

  const std::size_t n_seg = knots.size() - 1;
  const auto total = std::max<long long>(
      static_cast<long long>(n_seg),
      std::llround(span / period * static_cast<double>(cfg.steps_per_period)));

  // Largest-remainder split of the step budget, at least one step per segment.
  std::vector<long long> steps(n_seg);
  std::vector<std::pair<double, std::size_t>> remainder(n_seg);
  long long used = 0;
  for (std::size_t i = 0; i < n_seg; ++i) {
    const double share = static_cast<double>(total) * (knots[i + 1] - knots[i]) / span;
    steps[i] = std::max<long long>(1, static_cast<long long>(std::floor(share)));
    remainder[i] = {share - std::floor(share), i};
    used += steps[i];
  }
  std::stable_sort(remainder.begin(), remainder.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  for (std::size_t i = 0; used < total && i < n_seg; ++i, ++used) ++steps[remainder[i].second];

  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(used) + 1);
  for (std::size_t i = 0; i < n_seg; ++i) {
    const double lo = knots[i];
    const double len = knots[i + 1] - lo;
    for (long long m = 0; m < steps[i]; ++m) {
      grid.push_back(lo + len * static_cast<double>(m) / static_cast<double>(steps[i]));
    }
  }
  grid.push_back(t1);
  return grid;
}

MomentStack integrate(const MomentDynamics& dynamics, const MomentStack& x0, double t0, double t1,
                      const IntegrationConfig& cfg, Trajectory* samples) {
  if (x0.dimension() != dynamics.dimension()) {
    throw std::logic_error("integrate: initial stack does not match the dynamics");
  }
  const auto grid = make_time_grid(dynamics.scenario(), t0, t1, cfg);
  auto rhs = [&](double t, Side side, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dynamics.derivative(t, side, x, dx);
  };

  Eigen::VectorXd x = x0.data();
  detail::Rk4Workspace<Eigen::VectorXd> work;
  if (samples != nullptr) {
    samples->times.assign(grid.begin(), grid.end());
    samples->states.clear();
    samples->states.reserve(grid.size());
    samples->states.push_back(x0);
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    detail::rk4_step(rhs, grid[i], grid[i + 1] - grid[i], x, work);
    if (!x.allFinite()) throw NumericalError("non-finite moment state", grid[i + 1]);
    if (samples != nullptr) samples->states.emplace_back(x0.n_classes(), x0.n_states(), x);
  }
  return {x0.n_classes(), x0.n_states(), std::move(x)};
}

}  // namespace tvaoi
