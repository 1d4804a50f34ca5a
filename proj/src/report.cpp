#include "tvaoi/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace tvaoi {

std::string format_number(double v) {
  if (!std::isfinite(v)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string format_number(std::optional<double> v) { return v ? format_number(*v) : std::string{}; }

void write_trajectory_csv(std::ostream& out, const std::vector<ClassMetrics>& metrics) {
  out << "t,class,mean_aoi,peak_aoi,service_prob,unserved_age,gap_lhs,gap_rhs\n";
  if (metrics.empty()) return;
  for (std::size_t i = 0; i < metrics.front().times.size(); ++i) {
    for (const auto& m : metrics) {
      out << format_number(m.times[i]) << ',' << m.class_index << ','
          << format_number(m.mean_aoi[i]) << ',' << format_number(m.peak_aoi[i]) << ','
          << format_number(m.service_prob[i]) << ',' << format_number(m.unserved_age[i]) << ','
          << format_number(m.gap_lhs[i]) << ',' << format_number(m.gap_rhs[i]) << '\n';
    }
  }
}

void write_residuals_csv(std::ostream& out, const std::vector<double>& residuals) {
  out << "iteration,residual\n";
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    out << i + 1 << ',' << format_number(residuals[i]) << '\n';
  }
}

void write_mc_estimate_csv(std::ostream& out, const McEstimate& est) {
  out << "t,class,mean_aoi,mean_aoi_se,samples,peak_aoi,peak_aoi_se,completions\n";
  for (std::size_t j = 0; j < est.grid.size(); ++j) {
    for (std::size_t k = 0; k < est.mean_aoi.size(); ++k) {
      const BinStat& m = est.mean_aoi[k][j];
      const BinStat& p = est.peak_aoi[k][j];
      out << format_number(est.grid[j]) << ',' << k + 1 << ','
          << (m.defined ? format_number(m.value) : "") << ',' << format_number(m.se) << ','
          << format_number(m.count) << ',' << (p.defined ? format_number(p.value) : "") << ','
          << format_number(p.se) << ',' << format_number(p.count) << '\n';
    }
  }
}

void write_mae_csv(std::ostream& out, const std::vector<MaeRow>& rows) {
  out << "n_paths,class,mean_aoi_mae,peak_aoi_mae,mean_level\n";
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.mean_mae.size(); ++k) {
      out << r.n_paths << ',' << k + 1 << ',' << format_number(r.mean_mae[k]) << ','
          << format_number(r.peak_mae[k]) << ',' << format_number(r.mean_level[k]) << '\n';
    }
  }
}

void write_overlay_csv(std::ostream& out, const Scenario& scenario, const OdeReference& ode,
                       const McEstimate& mc) {
  out << "t,class,outage,ode_mean_aoi,mc_mean_aoi,mc_mean_aoi_se,ode_peak_aoi,mc_peak_aoi,"
         "mc_peak_aoi_se\n";
  for (std::size_t j = 0; j < ode.grid.size(); ++j) {
    const double t = ode.grid[j];
    const int outage = scenario.in_outage(t) ? 1 : 0;
    for (std::size_t k = 0; k < ode.mean_aoi.size(); ++k) {
      const BinStat& m = mc.mean_aoi[k][j];
      const BinStat& p = mc.peak_aoi[k][j];
      out << format_number(t) << ',' << k + 1 << ',' << outage << ','
          << format_number(ode.mean_aoi[k][j]) << ',' << (m.defined ? format_number(m.value) : "")
          << ',' << format_number(m.se) << ',' << format_number(ode.peak_aoi[k][j]) << ','
          << (p.defined ? format_number(p.value) : "") << ',' << format_number(p.se) << '\n';
    }
  }
}

void write_multipliers_csv(std::ostream& out, const FloquetReport& report) {
  out << "index,real,imag,abs\n";
  for (std::size_t i = 0; i < report.multipliers.size(); ++i) {
    const auto& m = report.multipliers[i];
    out << i + 1 << ',' << format_number(m.real()) << ',' << format_number(m.imag()) << ','
        << format_number(std::abs(m)) << '\n';
  }
}

}  // namespace tvaoi
