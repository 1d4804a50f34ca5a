#pragma once

#include <variant>
#include <vector>

namespace tvaoi {

/// Which one-sided value to take at a discontinuity of a rate profile.
/// Integrators evaluate the last stage of a step with `left` so that a step
/// ending on a breakpoint only sees the piece it covers.
enum class Side { right, left };

/// mu(t) = mu_peak * max(0, cos(pi/T_pass * (t - T_pass/2))) inside the pass
/// [0, T_pass) of each period, zero otherwise.
struct WindowedSinusoidService {
  double mu_peak;
  double t_pass;
};

/// lambda(t) = lambda_base + lambda_peak * (same windowed cosine).
struct WindowedSinusoidArrival {
  double lambda_base;
  double lambda_peak;
  double t_pass;
};

/// Value `values[j]` on [breakpoints[j], breakpoints[j+1]); breakpoints[0] == 0.
struct PiecewiseConstant {
  std::vector<double> breakpoints;
  std::vector<double> values;
};

/// Samples on the uniform grid j*T/n, linearly interpolated and wrapped.
struct SampledTable {
  std::vector<double> samples;
};

/// T-periodic, nonnegative rate function.
class RateProfile {
 public:
  using Shape = std::variant<WindowedSinusoidService, WindowedSinusoidArrival, PiecewiseConstant,
                             SampledTable>;

  /// Validates the shape against the period; throws ConfigError.
  RateProfile(Shape shape, double period);

  static RateProfile constant(double rate, double period) {
    return {PiecewiseConstant{{0.0}, {rate}}, period};
  }

  double period() const noexcept { return period_; }
  const Shape& shape() const noexcept { return shape_; }

  double eval(double t, Side side = Side::right) const;

  /// Upper bound of eval over a period (exact for every supported shape).
  double max_rate() const;

  /// Points in [0, T) where the profile or its derivative may be
  /// discontinuous. Always contains 0.
  std::vector<double> breakpoints() const;

 private:
  Shape shape_;
  double period_;
};

double eval(const RateProfile& profile, double t, Side side = Side::right);
double max_rate(const RateProfile& profile);

/// Arrival and service profiles of every class, sharing one period.
class Scenario {
 public:
  Scenario(double period, std::vector<RateProfile> arrival, std::vector<RateProfile> service);

  int n_classes() const noexcept { return static_cast<int>(arrival_.size()); }
  double period() const noexcept { return period_; }

  /// Class k is 1-based.
  const RateProfile& arrival(int k) const { return arrival_.at(static_cast<std::size_t>(k - 1)); }
  const RateProfile& service(int k) const { return service_.at(static_cast<std::size_t>(k - 1)); }

  double lambda(int k, double t, Side side = Side::right) const { return arrival(k).eval(t, side); }
  double mu(int k, double t, Side side = Side::right) const { return service(k).eval(t, side); }

  /// True when every service rate is zero at t (link outage).
  bool in_outage(double t, Side side = Side::right) const;

  /// Sorted union of all profile breakpoints in [0, T).
  std::vector<double> breakpoints() const;

 private:
  double period_;
  std::vector<RateProfile> arrival_;
  std::vector<RateProfile> service_;
};

/// The three-class windowed-sinusoid scenario with period 10 and a
/// 5-unit pass used throughout the examples and tests.
Scenario reference_scenario();

/// Single class with constant arrival and service rates.
Scenario constant_scenario(double lambda, double mu, double period);

}  // namespace tvaoi
