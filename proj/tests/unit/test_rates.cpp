#include <doctest.h>

#include <random>

#include "tvaoi/error.hpp"
#include "tvaoi/rates.hpp"

using namespace tvaoi;

TEST_CASE("windowed sinusoid values") {
  const RateProfile mu(WindowedSinusoidService{3.0, 5.0}, 10.0);
  CHECK(mu.eval(2.5) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(mu.eval(7.0) == 0.0);
  CHECK(mu.eval(0.0) == 0.0);
  CHECK(mu.eval(5.0) == 0.0);
  const RateProfile lam(WindowedSinusoidArrival{0.05, 0.10, 5.0}, 10.0);
  CHECK(lam.eval(2.5) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(lam.eval(8.0) == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("max rates") {
  CHECK(RateProfile(WindowedSinusoidService{1.5, 5.0}, 10.0).max_rate() == 1.5);
  CHECK(RateProfile(WindowedSinusoidArrival{0.20, 0.80, 5.0}, 10.0).max_rate() == doctest::Approx(1.0));
  CHECK(RateProfile(PiecewiseConstant{{0.0, 2.0, 6.0}, {0.3, 0.0, 0.7}}, 10.0).max_rate() == 0.7);
}

TEST_CASE("piecewise constant one-sided values") {
  const RateProfile p(PiecewiseConstant{{0.0, 2.0, 6.0}, {0.3, 0.0, 0.7}}, 10.0);
  CHECK(p.eval(2.0, Side::right) == 0.0);
  CHECK(p.eval(2.0, Side::left) == 0.3);
  CHECK(p.eval(10.0, Side::left) == 0.7);
  CHECK(p.eval(10.0, Side::right) == 0.3);
  CHECK(p.eval(11.0) == 0.3);
  CHECK(p.eval(13.0) == 0.0);
}

TEST_CASE("sampled table interpolates and wraps") {
  const RateProfile p(SampledTable{{1.0, 3.0}}, 10.0);
  CHECK(p.eval(0.0) == 1.0);
  CHECK(p.eval(2.5) == doctest::Approx(2.0));
  CHECK(p.eval(7.5) == doctest::Approx(2.0));
  CHECK(p.max_rate() == 3.0);
}

TEST_CASE("invalid profiles") {
  CHECK_THROWS_AS(RateProfile(WindowedSinusoidService{-1.0, 5.0}, 10.0), ConfigError);
  CHECK_THROWS_AS(RateProfile(WindowedSinusoidService{1.0, 12.0}, 10.0), ConfigError);
  CHECK_THROWS_AS(RateProfile(WindowedSinusoidArrival{0.1, -0.1, 5.0}, 10.0), ConfigError);
  CHECK_THROWS_AS(RateProfile(PiecewiseConstant{{0.5}, {1.0}}, 10.0), ConfigError);
  CHECK_THROWS_AS(RateProfile(PiecewiseConstant{{0.0, 0.0}, {1.0, 2.0}}, 10.0), ConfigError);
  CHECK_THROWS_AS(RateProfile(SampledTable{{}}, 10.0), ConfigError);
  CHECK_THROWS_AS(RateProfile::constant(1.0, 0.0), ConfigError);
}

TEST_CASE("scenario validation") {
  const auto c = RateProfile::constant(1.0, 10.0);
  CHECK_THROWS_AS(Scenario(10.0, {c}, {c, c}), ConfigError);
  CHECK_THROWS_AS(Scenario(10.0, {}, {}), ConfigError);
  CHECK_THROWS_AS(Scenario(5.0, {c}, {c}), ConfigError);
  const Scenario s = reference_scenario();
  CHECK(s.n_classes() == 3);
  CHECK(s.breakpoints() == std::vector<double>{0.0, 5.0});
  CHECK(s.in_outage(7.0));
  CHECK_FALSE(s.in_outage(1.0));
}

TEST_CASE("periodicity, nonnegativity and domination on random times") {
  const Scenario s = reference_scenario();
  std::mt19937_64 rng(7);
  // Dyadic times so t + T is exact in floating point.
  std::uniform_int_distribution<int> tick(0, 1 << 20);
  for (int i = 0; i < 1000; ++i) {
    const double t = std::ldexp(static_cast<double>(tick(rng)), -14);
    for (int k = 1; k <= 3; ++k) {
      for (const RateProfile* p : {&s.arrival(k), &s.service(k)}) {
        const double v = p->eval(t);
        CHECK(v >= 0.0);
        CHECK(v <= p->max_rate());
        if (i < 100) CHECK(v == p->eval(t + s.period()));
      }
    }
  }
}
