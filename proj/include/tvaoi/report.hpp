#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tvaoi/metrics.hpp"
#include "tvaoi/montecarlo.hpp"
#include "tvaoi/pss.hpp"

namespace tvaoi {

/// Shortest round-trip decimal form ('.' separator); undefined values are
/// empty cells.
std::string format_number(double v);
std::string format_number(std::optional<double> v);

/// t,class,mean_aoi,peak_aoi,service_prob,unserved_age,gap_lhs,gap_rhs
/// One row per grid point per class, grid-major.
void write_trajectory_csv(std::ostream& out, const std::vector<ClassMetrics>& metrics);

/// iteration,residual
void write_residuals_csv(std::ostream& out, const std::vector<double>& residuals);

/// t,class,mean_aoi,mean_aoi_se,samples,peak_aoi,peak_aoi_se,completions
void write_mc_estimate_csv(std::ostream& out, const McEstimate& est);

/// n_paths,class,mean_aoi_mae,peak_aoi_mae,mean_level
void write_mae_csv(std::ostream& out, const std::vector<MaeRow>& rows);

/// t,class,outage,ode_mean_aoi,mc_mean_aoi,mc_mean_aoi_se,ode_peak_aoi,mc_peak_aoi,mc_peak_aoi_se
void write_overlay_csv(std::ostream& out, const Scenario& scenario, const OdeReference& ode,
                       const McEstimate& mc);

/// index,real,imag,abs
void write_multipliers_csv(std::ostream& out, const FloquetReport& report);

}  // namespace tvaoi
