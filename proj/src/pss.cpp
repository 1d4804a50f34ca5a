#include "tvaoi/pss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "tvaoi/detail/rk4.hpp"
#include "tvaoi/error.hpp"

namespace tvaoi {

void validate(const PssConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (cfg.max_iters < 1) throw ConfigError("max_iters must be at least 1");
  validate(cfg.integration);
}

MomentStack one_period_map(const MomentDynamics& dynamics, const MomentStack& x0,
                           const IntegrationConfig& cfg) {
  return integrate(dynamics, x0, 0.0, dynamics.scenario().period(), cfg);
}

MomentStack renormalize(MomentStack x) {
  const double total = x.p().sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError("probability block does not sum to a positive value",
                         std::numeric_limits<double>::quiet_NaN());
  }
  x.p() /= total;
  return x;
}

double relative_residual(const MomentStack& next, const MomentStack& current) {
  return (next.data() - current.data()).norm() / (1.0 + current.data().norm());
}

PssSolution solve_pss(const MomentDynamics& dynamics, const PssConfig& cfg,
                      std::optional<MomentStack> initial) {
  validate(cfg);
  MomentStack x = initial ? std::move(*initial) : MomentStack::idle_start(dynamics.space());
  if (x.dimension() != dynamics.dimension()) {
    throw std::logic_error("solve_pss: initial stack does not match the dynamics");
  }

  PssSolution sol{x, {}, {}, false, 0, 0.0};
  for (int n = 0; n < cfg.max_iters; ++n) {
    MomentStack mapped = renormalize(one_period_map(dynamics, x, cfg.integration));
    MomentStack updated(x.n_classes(), x.n_states(),
                        (1.0 - cfg.alpha) * x.data() + cfg.alpha * mapped.data());
    const double res = relative_residual(updated, x);
    sol.residual_history.push_back(res);
    sol.iterations = n + 1;
    x = std::move(updated);
    if (res <= cfg.epsilon) {
      sol.converged = true;
      break;
    }
  }

  sol.x_star_0 = x;
  const MomentStack end =
      integrate(dynamics, x, 0.0, dynamics.scenario().period(), cfg.integration, &sol.trajectory);
  sol.periodicity_residual = relative_residual(end, x);
  return sol;
}

Eigen::MatrixXd compact_coefficient(const StateSpace& space, const IndicatorVectors& ind,
                                    const GeneratorSet& gen, const RateSample& rates) {
  const int n_classes = space.n_classes();
  const auto n = static_cast<Eigen::Index>(space.size());
  const Eigen::Index m = n - 1;
  const Eigen::Index dim = (2 * n_classes + 1) * n + m;
  const Eigen::Index p_off = (2 * n_classes + 1) * n;
  auto off = [n](int block) { return static_cast<Eigen::Index>(block) * n; };

  // p^T = Tm^T p_red^T + e_last, Tm = [I | -1].
  Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(n, m);
  lift.topRows(m).setIdentity();
  lift.row(m).setConstant(-1.0);

  const Eigen::MatrixXd Qt = gen.Q.transpose();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 1; k <= n_classes; ++k) {
    const auto& Mk = gen.M_class[static_cast<std::size_t>(k - 1)];
    A.block(off(k - 1), off(k - 1), n, n) = Qt - Mk.transpose();
    A.block(off(k - 1), off(n_classes), n, n) = Mk.transpose();
    A.block(off(k - 1), p_off, n, m) = lift;
  }

  const int yb = n_classes;
  A.block(off(yb), off(yb), n, n) = Qt - gen.M_comp.transpose();
  for (int k = 1; k <= n_classes; ++k) {
    A.block(off(yb), off(yb + k), n, n) =
        gen.M_comp.transpose() * ind.next_class_is(k).transpose().asDiagonal();
  }
  A.block(off(yb), p_off, n, m) = ind.busy.transpose().asDiagonal() * lift;

  for (int k = 1; k <= n_classes; ++k) {
    const auto& w = ind.waiting_class(k);
    const double lambda = rates.lambda[static_cast<std::size_t>(k - 1)];
    Eigen::MatrixXd diag_block = Qt - gen.M_next[static_cast<std::size_t>(k - 1)].transpose();
    diag_block.diagonal() -= lambda * w.transpose();
    A.block(off(yb + k), off(yb + k), n, n) = diag_block;
    A.block(off(yb + k), p_off, n, m) = w.transpose().asDiagonal() * lift;
  }

  A.block(p_off, p_off, m, m) = reduce(gen).Q_red.transpose();
  return A;
}

FloquetReport monodromy(const MomentDynamics& dynamics, const IntegrationConfig& cfg,
                        unsigned threads) {
  const StateSpace& space = dynamics.space();
  const Scenario& scenario = dynamics.scenario();
  const IndicatorVectors ind = indicators(space);
  const auto grid = make_time_grid(scenario, 0.0, scenario.period(), cfg);

  const auto n = static_cast<Eigen::Index>(space.size());
  const Eigen::Index dim = (2 * space.n_classes() + 1) * n + (n - 1);

  auto coefficient = [&](double t, Side side) {
    const RateSample rates = sample_rates(scenario, t, side);
    return compact_coefficient(space, ind, build_generator(space, rates, t), rates);
  };

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<Eigen::Index>(threads, dim));
  const Eigen::Index chunk = (dim + threads - 1) / threads;

  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(dim, dim);
  auto integrate_columns = [&](Eigen::Index first, Eigen::Index count) {
    Eigen::MatrixXd cols = phi.middleCols(first, count);
    auto rhs = [&](double t, Side side, const Eigen::MatrixXd& x, Eigen::MatrixXd& dx) {
      dx.noalias() = coefficient(t, side) * x;
    };
    detail::Rk4Workspace<Eigen::MatrixXd> work;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      detail::rk4_step(rhs, grid[i], grid[i + 1] - grid[i], cols, work);
    }
    phi.middleCols(first, count) = cols;
  };
  {
    std::vector<std::jthread> pool;
    for (Eigen::Index first = 0; first < dim; first += chunk) {
      pool.emplace_back(integrate_columns, first, std::min(chunk, dim - first));
    }
  }
  if (!phi.allFinite()) throw NumericalError("non-finite monodromy matrix", scenario.period());

  FloquetReport report;
  for (int b = 0; b < 2 * space.n_classes() + 1; ++b) report.block_sizes.push_back(n);
  report.block_sizes.push_back(n - 1);

  // Spectrum of a block upper triangular matrix is the union of the spectra
  // of its diagonal blocks.
  Eigen::Index start = 0;
  for (Eigen::Index size : report.block_sizes) {
    const Eigen::MatrixXd block = phi.block(start, start, size, size);
    Eigen::EigenSolver<Eigen::MatrixXd> es(block, false);
    for (Eigen::Index i = 0; i < size; ++i) report.multipliers.push_back(es.eigenvalues()(i));
    if (const Eigen::Index below = dim - start - size; below > 0) {
      report.lower_block_residual =
          std::max(report.lower_block_residual,
                   phi.block(start + size, start, below, size).cwiseAbs().maxCoeff());
    }
    start += size;
  }
  for (const auto& mult : report.multipliers) {
    report.spectral_radius = std::max(report.spectral_radius, std::abs(mult));
  }
  report.stable = report.spectral_radius < 1.0;
  report.monodromy = std::move(phi);
  return report;
}

double contraction_rate(std::span<const double> residuals) {
  if (residuals.size() < 5) {
    throw InsufficientDataError("contraction_rate needs at least five residuals");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto count = static_cast<double>(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const auto x = static_cast<double>(i);
    const double y = std::log(residuals[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return std::exp(slope);
}

}  // namespace tvaoi
