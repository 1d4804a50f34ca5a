// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tvaoi/generator.hpp"
#include "tvaoi/metrics.hpp"
#include "tvaoi/montecarlo.hpp"
#include "tvaoi/pss.hpp"

using namespace tvaoi;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < budget_s;
  const bool pass = out.pass && in_time;
  failures += pass ? 0 : 1;
  std::printf("%s  %-28s %s | %.2fs (limit %.0fs)%s\n", pass ? "PASS" : "FAIL", name, out.detail.c_str(),
              secs, budget_s, in_time ? "" : " over time");
  std::fflush(stdout);
}

double rel_diff(const MomentStack& a, const MomentStack& b) {
  return (a.data() - b.data()).norm() / (1.0 + b.data().norm());
}

const MomentDynamics& table1() {
  static const MomentDynamics dyn(StateSpace(3), reference_scenario());
  return dyn;
}

PssConfig table1_solver() {
  PssConfig cfg;
  cfg.epsilon = 1e-10;
  cfg.alpha = 1.0;
  return cfg;
}

const PssSolution& table1_pss() {
  static const PssSolution sol = solve_pss(table1(), table1_solver());
  return sol;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

int main() {
  std::printf("tvaoi acceptance suite\n");

  criterion("generator validity", 5, [] {
    const StateSpace space(3);
    const Scenario sc = reference_scenario();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ut(0.0, sc.period());
    double worst_row = 0.0, min_off = 0.0, worst_split = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto g = build_generator(space, sc, ut(rng));
      worst_row = std::max(worst_row, g.Q.rowwise().sum().cwiseAbs().maxCoeff());
      Eigen::MatrixXd off = g.Q;
      off.diagonal().setZero();
      min_off = std::min(min_off, off.minCoeff());
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(g.Q.rows(), g.Q.cols());
      for (const auto& m : g.M_class) sum += m;
      worst_split = std::max(worst_split, (sum - g.M_comp).cwiseAbs().maxCoeff());
    }
    return Outcome{worst_row <= 1e-12 && min_off >= 0.0 && worst_split == 0.0,
                   "max |row sum| " + fmt("%.2e", worst_row) + ", min off-diag " + fmt("%.2e", min_off) +
                       ", max |sum M_class - M_comp| " + fmt("%.2e", worst_split)};
  });

  criterion("probability conservation", 10, [] {
    Trajectory tr;
    integrate(table1(), MomentStack::idle_start(table1().space()), 0.0, 10.0, IntegrationConfig{2000}, &tr);
    double worst = 0.0;
    for (const auto& x : tr.states) worst = std::max(worst, std::abs(x.p().sum() - 1.0));
    return Outcome{worst <= 1e-8, "max |sum p - 1| " + fmt("%.2e", worst)};
  });

  criterion("PSS convergence", 120, [] {
    const auto& sol = table1_pss();
    const auto fx = one_period_map(table1(), sol.x_star_0, table1_solver().integration);
    const double post = rel_diff(fx, sol.x_star_0);
    const auto& h = sol.residual_history;
    const std::size_t tail = std::max<std::size_t>(5, h.size() / 2);
    const double ratio =
        h.size() >= 5 ? contraction_rate(std::span(h).last(std::min(tail, h.size()))) : 1.0;
    return Outcome{sol.converged && post <= 1e-9 && ratio < 1.0,
                   "converged=" + std::string(sol.converged ? "true" : "false") + " in " +
                       std::to_string(sol.iterations) + " iterations, ||F(x*)-x*||/(1+||x*||) " +
                       fmt("%.2e", post) + ", tail ratio " + fmt("%.3f", ratio)};
  });

  criterion("uniqueness probe", 120, [] {
    const auto uni = solve_pss(table1(), table1_solver(), MomentStack::uniform_start(table1().space()));
    const double d = rel_diff(uni.x_star_0, table1_pss().x_star_0);
    return Outcome{uni.converged && table1_pss().converged && d <= 1e-8,
                   "idle vs uniform start relative difference " + fmt("%.2e", d)};
  });

  criterion("Floquet bound", 300, [] {
    const auto rep = monodromy(table1(), table1_solver().integration);
    const std::size_t n = table1().space().size();
    const bool count_ok = rep.multipliers.size() == 7 * n + n - 1;
    return Outcome{rep.stable && rep.lower_block_residual <= 1e-9 && count_ok,
                   "spectral radius " + fmt("%.6f", rep.spectral_radius) + ", lower-block residual " +
                       fmt("%.2e", rep.lower_block_residual) + ", " +
                       std::to_string(rep.multipliers.size()) + " multipliers"};
  });

  criterion("gap identity", 60, [] {
    const auto all = all_class_metrics(table1().space(), table1().scenario(), table1_pss().trajectory);
    double worst = 0.0;
    int checked = 0;
    for (const auto& m : all) {
      for (std::size_t i = 0; i < m.times.size(); ++i) {
        if (!m.gap_lhs[i]) continue;
        ++checked;
        worst = std::max(worst, std::abs(*m.gap_lhs[i] - *m.gap_rhs[i]) / (1.0 + std::abs(*m.gap_lhs[i])));
      }
    }
    return Outcome{checked > 0 && worst <= 1e-8,
                   std::to_string(checked) + " defined points, max relative mismatch " + fmt("%.2e", worst)};
  });

  criterion("inversion phenomenon", 60, [] {
    const auto m = class_metrics(table1().space(), table1().scenario(), table1_pss().trajectory, 3);
    int count = 0;
    double best = 0.0, at = 0.0;
    for (std::size_t i = 0; i < m.times.size(); ++i) {
      if (!m.peak_aoi[i]) continue;
      const double excess = m.mean_aoi[i] - *m.peak_aoi[i];
      if (excess > 0.0) ++count;
      if (excess > best) {
        best = excess;
        at = m.times[i];
      }
    }
    return Outcome{count > 0, "class 3 mean > peak at " + std::to_string(count) +
                                  " grid points, largest excess " + fmt("%.4f", best) + " at t=" +
                                  fmt("%.3f", at)};
  });

  criterion("single-class reduction", 300, [] {
    const MomentDynamics dyn(StateSpace(1), constant_scenario(1.0, 2.0, 10.0));
    const auto sol = solve_pss(dyn, PssConfig{});
    const auto m = class_metrics(dyn.space(), dyn.scenario(), sol.trajectory, 1);
    double spread = 0.0;
    auto span_of = [&](const auto& series) {
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& v : series) {
        const double x = static_cast<double>(v);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
      spread = std::max(spread, hi - lo);
    };
    auto values = [](const std::vector<std::optional<double>>& s) {
      std::vector<double> out;
      for (const auto& v : s) out.push_back(v.value_or(NAN));
      return out;
    };
    span_of(m.mean_aoi);
    span_of(values(m.peak_aoi));
    span_of(m.service_prob);
    span_of(values(m.unserved_age));
    span_of(values(m.gap_lhs));
    span_of(values(m.gap_rhs));
    const bool all_defined = std::all_of(m.peak_aoi.begin(), m.peak_aoi.end(), [](auto& v) { return v.has_value(); });

    McConfig mc;
    mc.sample_periods = 300;
    mc.root_seed = 7;
    const auto grid = sampling_grid(dyn.scenario(), PssConfig{}.integration, 20);
    const auto paths = simulate_paths(dyn.scenario(), mc, grid, 200);
    std::uint64_t events = 0;
    for (const auto& p : paths) events += p.n_events;
    const auto est = estimate(paths, dyn.scenario().period(), grid);
    const double ode_mean = m.mean_aoi.front();
    const double ode_peak = *m.peak_aoi.front();
    const auto& mm = est.pooled_mean_aoi[0];
    const auto& pm = est.pooled_peak_aoi[0];
    const double z_mean = (mm.value - ode_mean) / mm.se;
    const double z_peak = (pm.value - ode_peak) / pm.se;
    return Outcome{sol.converged && all_defined && spread <= 1e-8 && events >= 1000000 &&
                       std::abs(z_mean) <= 3.0 && std::abs(z_peak) <= 3.0,
                   "max-min " + fmt("%.1e", spread) + "; " + std::to_string(events) + " events; mean AoI ODE " +
                       fmt("%.6f", ode_mean) + " MC " + fmt("%.6f", mm.value) + " (z " + fmt("%+.2f", z_mean) +
                       "); peak AoI ODE " + fmt("%.6f", ode_peak) + " MC " + fmt("%.6f", pm.value) + " (z " +
                       fmt("%+.2f", z_peak) + ")"};
  });

  criterion("MC validation at desk scale", 900, [] {
    McConfig mc;
    const auto grid = sampling_grid(table1().scenario(), table1_solver().integration, 100);
    const auto rows = progressive_mae(table1(), table1_pss(), mc, grid, {100, 500, 1000, 5000});
    const std::size_t n_classes = rows.front().mean_mae.size();
    std::ostringstream d;
    bool ok = true;
    std::vector<double> avg(rows.size(), 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t k = 0; k < n_classes; ++k) avg[r] += rows[r].mean_mae[k] / rows[r].mean_level[k] / n_classes;
    }
    int agg_inv = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) agg_inv += avg[r] > avg[r - 1];
    ok = ok && agg_inv <= 1;
    d << "relative MAE by paths:";
    for (std::size_t r = 0; r < rows.size(); ++r) d << ' ' << rows[r].n_paths << ':' << fmt("%.4f", avg[r]);
    d << " (" << agg_inv << " inversions); per class";
    for (std::size_t k = 0; k < n_classes; ++k) {
      int inv = 0;
      for (std::size_t r = 1; r < rows.size(); ++r) inv += rows[r].mean_mae[k] > rows[r - 1].mean_mae[k];
      const double final_rel = rows.back().mean_mae[k] / rows.back().mean_level[k];
      ok = ok && inv <= 1 && final_rel < 0.05;
      d << " [" << k + 1 << ": final " << fmt("%.4f", final_rel) << ", " << inv << " inv]";
    }
    return Outcome{ok, d.str()};
  });

  criterion("integrator self-convergence", 60, [] {
    const auto x0 = MomentStack::idle_start(table1().space());
    const auto ref = integrate(table1(), x0, 0.0, 10.0, IntegrationConfig{8000}).data();
    const double e500 = (integrate(table1(), x0, 0.0, 10.0, IntegrationConfig{500}).data() - ref).norm();
    const double e1000 = (integrate(table1(), x0, 0.0, 10.0, IntegrationConfig{1000}).data() - ref).norm();
    const double ratio = e500 / e1000;
    return Outcome{ratio >= 12.0, "error 500 " + fmt("%.3e", e500) + ", 1000 " + fmt("%.3e", e1000) +
                                      ", ratio " + fmt("%.2f", ratio)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
