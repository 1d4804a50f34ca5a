#include "tvaoi/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tvaoi/error.hpp"
#include "tvaoi/state_space.hpp"

namespace tvaoi {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool nonneg_finite(double v) { return std::isfinite(v) && v >= 0.0; }

void check_pass(double t_pass, double period) {
  if (!(t_pass > 0.0) || !std::isfinite(t_pass)) throw ConfigError("t_pass must be positive");
  if (t_pass > period) throw ConfigError("t_pass must not exceed the period");
}

// Windowed cosine in [0, 1]; `phase` is already reduced to [0, T].
double window(double phase, double t_pass, Side side) {
  const bool inside = (side == Side::left && phase > 0.0) ? phase <= t_pass : phase < t_pass;
  if (!inside) return 0.0;
  // cos(pi/T_pass (phase - T_pass/2)) written so both window edges are exactly 0.
  return std::sin(std::numbers::pi * std::min(phase, t_pass - phase) / t_pass);
}

}  // namespace

RateProfile::RateProfile(Shape shape, double period) : shape_(std::move(shape)), period_(period) {
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("period must be positive");
  std::visit(
      overloaded{
          [&](const WindowedSinusoidService& s) {
            if (!nonneg_finite(s.mu_peak)) throw ConfigError("mu_peak must be nonnegative");
            check_pass(s.t_pass, period);
          },
          [&](const WindowedSinusoidArrival& s) {
            if (!nonneg_finite(s.lambda_base) || !nonneg_finite(s.lambda_peak)) {
              throw ConfigError("arrival rates must be nonnegative");
            }
            check_pass(s.t_pass, period);
          },
          [&](const PiecewiseConstant& s) {
            if (s.breakpoints.empty() || s.breakpoints.size() != s.values.size()) {
              throw ConfigError("piecewise_constant needs one value per breakpoint");
            }
            if (s.breakpoints.front() != 0.0) throw ConfigError("first breakpoint must be 0");
            for (std::size_t j = 1; j < s.breakpoints.size(); ++j) {
              if (!(s.breakpoints[j] > s.breakpoints[j - 1])) {
                throw ConfigError("breakpoints must be strictly increasing");
              }
            }
            if (!(s.breakpoints.back() < period)) throw ConfigError("breakpoints must lie in [0, T)");
            for (double v : s.values) {
              if (!nonneg_finite(v)) throw ConfigError("rates must be nonnegative");
            }
          },
          [&](const SampledTable& s) {
            if (s.samples.empty()) throw ConfigError("sampled_table needs at least one sample");
            for (double v : s.samples) {
              if (!nonneg_finite(v)) throw ConfigError("rates must be nonnegative");
            }
          },
      },
      shape_);
}

double RateProfile::eval(double t, Side side) const {
  double phase = std::fmod(t, period_);
  if (phase < 0.0) phase += period_;
  if (side == Side::left && phase == 0.0 && t > 0.0) phase = period_;

  return std::visit(
      overloaded{
          [&](const WindowedSinusoidService& s) { return s.mu_peak * window(phase, s.t_pass, side); },
          [&](const WindowedSinusoidArrival& s) {
            return s.lambda_base + s.lambda_peak * window(phase, s.t_pass, side);
          },
          [&](const PiecewiseConstant& s) {
            const auto& bp = s.breakpoints;
            auto it = side == Side::right ? std::upper_bound(bp.begin(), bp.end(), phase)
                                          : std::lower_bound(bp.begin(), bp.end(), phase);
            const auto j = it == bp.begin() ? 0 : static_cast<std::size_t>(it - bp.begin()) - 1;
            return s.values[j];
          },
          [&](const SampledTable& s) {
            const auto n = s.samples.size();
            const double x = phase / period_ * static_cast<double>(n);
            const double fl = std::floor(x);
            const double frac = x - fl;
            const auto j = static_cast<std::size_t>(fl) % n;
            return s.samples[j] * (1.0 - frac) + s.samples[(j + 1) % n] * frac;
          },
      },
      shape_);
}

double RateProfile::max_rate() const {
  return std::visit(
      overloaded{
          [](const WindowedSinusoidService& s) { return s.mu_peak; },
          [](const WindowedSinusoidArrival& s) { return s.lambda_base + s.lambda_peak; },
          [](const PiecewiseConstant& s) { return *std::max_element(s.values.begin(), s.values.end()); },
          [](const SampledTable& s) { return *std::max_element(s.samples.begin(), s.samples.end()); },
      },
      shape_);
}

std::vector<double> RateProfile::breakpoints() const {
  return std::visit(
      overloaded{
          [](const WindowedSinusoidService& s) { return std::vector<double>{0.0, s.t_pass}; },
          [](const WindowedSinusoidArrival& s) { return std::vector<double>{0.0, s.t_pass}; },
          [](const PiecewiseConstant& s) { return s.breakpoints; },
          [&](const SampledTable& s) {
            std::vector<double> out(s.samples.size());
            for (std::size_t j = 0; j < out.size(); ++j) {
              out[j] = period_ * static_cast<double>(j) / static_cast<double>(out.size());
            }
            return out;
          },
      },
      shape_);
}

double eval(const RateProfile& profile, double t, Side side) { return profile.eval(t, side); }
double max_rate(const RateProfile& profile) { return profile.max_rate(); }

Scenario::Scenario(double period, std::vector<RateProfile> arrival, std::vector<RateProfile> service)
    : period_(period), arrival_(std::move(arrival)), service_(std::move(service)) {
  if (arrival_.size() != service_.size()) {
    throw ConfigError("arrival and service profile counts differ");
  }
  if (arrival_.empty() || arrival_.size() > static_cast<std::size_t>(kMaxClasses)) {
    throw ConfigError("class count must be in 1.." + std::to_string(kMaxClasses));
  }
  auto same_period = [&](const RateProfile& p) {
    return std::abs(p.period() - period_) <= 1e-12 * period_;
  };
  if (!std::all_of(arrival_.begin(), arrival_.end(), same_period) ||
      !std::all_of(service_.begin(), service_.end(), same_period)) {
    throw ConfigError("all rate profiles must share the scenario period");
  }
}

bool Scenario::in_outage(double t, Side side) const {
  return std::all_of(service_.begin(), service_.end(),
                     [&](const RateProfile& p) { return p.eval(t, side) == 0.0; });
}

std::vector<double> Scenario::breakpoints() const {
  std::vector<double> out;
  for (const auto* list : {&arrival_, &service_}) {
    for (const auto& p : *list) {
      auto b = p.breakpoints();
      out.insert(out.end(), b.begin(), b.end());
    }
  }
  std::erase_if(out, [&](double b) { return b < 0.0 || b >= period_; });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [&](double x, double y) { return std::abs(x - y) <= 1e-12 * period_; }),
            out.end());
  return out;
}

Scenario reference_scenario() {
  constexpr double kPeriod = 10.0;
  constexpr double kPass = 5.0;
  const double mu_peak[] = {1.0, 1.5, 3.0};
  const double lambda_base[] = {0.05, 0.10, 0.20};
  const double lambda_peak[] = {0.10, 0.30, 0.80};
  std::vector<RateProfile> arrival;
  std::vector<RateProfile> service;
  for (int k = 0; k < 3; ++k) {
    arrival.emplace_back(WindowedSinusoidArrival{lambda_base[k], lambda_peak[k], kPass}, kPeriod);
    service.emplace_back(WindowedSinusoidService{mu_peak[k], kPass}, kPeriod);
  }
  return {kPeriod, std::move(arrival), std::move(service)};
}

Scenario constant_scenario(double lambda, double mu, double period) {
  return {period, {RateProfile::constant(lambda, period)}, {RateProfile::constant(mu, period)}};
}

}  // namespace tvaoi
