#include <doctest.h>

#include <cmath>

#include "qdemux/errors.hpp"
#include "qdemux/franson.hpp"

using namespace qdemux;

namespace {

UmiSpec fiber_umi() { return UmiSpec{}; }

UmiSpec ktp_umi(double length_mm) {
  UmiSpec u;
  u.label = "free-space-ktp";
  u.wavelength_nm = 525.0;
  u.medium = TuningMedium{1.6e-5, 1.0, length_mm};
  return u;
}

// Composite Simpson over one phase period.
template <typename F>
double simpson_2pi(F f, int n = 2000) {
  const double h = 2.0 * M_PI / n;
  double s = f(0.0) + f(2.0 * M_PI);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_SUITE("franson") {
  TEST_CASE("outcome probabilities sum to one") {
    for (double v : {0.0, 0.5, 0.9622, 1.0}) {
      for (double phi = 0.0; phi < 2 * M_PI; phi += 0.1) {
        FringeModel m{v, phi, 0.0, 0.0};
        const auto d = outcome_distribution(m);
        CHECK(std::abs(d.center + d.early + d.late + d.lost - 1.0) <= 1e-12);
        CHECK(d.center >= 0.0);
        CHECK(d.lost >= 0.0);
      }
    }
  }

  TEST_CASE("central peak weights") {
    FringeModel m;
    const auto d = outcome_distribution(m);
    CHECK(d.center == doctest::Approx(0.25));
    CHECK(d.early == doctest::Approx(1.0 / 16));
    CHECK(d.late == doctest::Approx(1.0 / 16));
    m.signal_phase = M_PI;
    CHECK(outcome_distribution(m).center == doctest::Approx(0.0).epsilon(1e-15));
    m.visibility = 1.5;
    CHECK_THROWS_AS(outcome_distribution(m), DomainError);
  }

  TEST_CASE("phase-averaged central fraction is one half") {
    for (double v : {0.3, 0.9622, 1.0}) {
      auto center = [&](double phi) { return outcome_distribution(FringeModel{v, phi, 0.0, 0.0}).center; };
      auto all = [&](double phi) {
        const auto d = outcome_distribution(FringeModel{v, phi, 0.0, 0.0});
        return d.center + d.early + d.late;
      };
      CHECK(std::abs(simpson_2pi(center) / simpson_2pi(all) - 0.5) <= 1e-9);
    }
  }

  TEST_CASE("per-photon exit marginals carry no fringe") {
    for (double phi = 0.0; phi < 2 * M_PI; phi += 0.25) {
      const FringeModel m{0.9, 0.0, phi, 0.3};
      const auto e = exit_distribution(m);
      const auto d = outcome_distribution(m);
      CHECK(e.both == doctest::Approx(d.center + d.early + d.late));
      CHECK(e.both + e.signal_only == doctest::Approx(0.5));
      CHECK(e.both + e.idler_only == doctest::Approx(0.5));
      CHECK(std::abs(e.both + e.signal_only + e.idler_only + e.neither - 1.0) <= 1e-12);
      CHECK(e.neither >= 0.0);
    }
  }

  TEST_CASE("fringe expectation") {
    FringeModel m{0.9622, 0.0, 0.0, 0.0};
    CHECK(fringe_expectation(m, 100.0) == doctest::Approx(100.0 * (1 + 0.9622) / 2));
    m.idler_phase = M_PI / 2;
    CHECK(fringe_expectation(m, 100.0) == doctest::Approx(50.0));
    CHECK_THROWS_AS(fringe_expectation(m, -1.0), DomainError);
  }

  TEST_CASE("fiber UMI geometry and tuning period") {
    const UmiSpec u = fiber_umi();
    CHECK(path_length_difference_mm(u) == doctest::Approx(299792458.0 * 1.6e-9 / (2 * 1.467) * 1e3));
    CHECK(path_length_difference_mm(u) == doctest::Approx(163.48).epsilon(1e-4));
    CHECK(std::abs(temperature_tuning_period(u) - 0.585) <= 0.001);
  }

  TEST_CASE("KTP UMI tuning period and the 163.48 mm inconsistency") {
    const double derived = tunable_length_for_period_mm(ktp_umi(1.0), 1.16);
    CHECK(derived == doctest::Approx(525e-9 / (2 * 1.16 * 1.6e-5) * 1e3));
    CHECK(derived == doctest::Approx(14.1).epsilon(0.01));
    CHECK(temperature_tuning_period(ktp_umi(14.14)) == doctest::Approx(1.16).epsilon(1e-3));

    const auto bad = check_tuning_period(ktp_umi(163.48), 1.16, 0.01);
    CHECK_FALSE(bad.consistent);
    CHECK(bad.computed_k == doctest::Approx(0.1004).epsilon(1e-3));
    CHECK(bad.implied_length_mm == doctest::Approx(derived));
    CHECK(check_tuning_period(ktp_umi(14.14), 1.16, 0.01).consistent);
  }

  TEST_CASE("temperature to phase wraps into [0, 2 pi)") {
    const UmiSpec u = fiber_umi();
    const double period = temperature_tuning_period(u);
    CHECK(phase_from_temperature(u, 0.0) == 0.0);
    CHECK(phase_from_temperature(u, period / 4) == doctest::Approx(M_PI / 2));
    CHECK(phase_from_temperature(u, period) == doctest::Approx(0.0));
    CHECK(phase_from_temperature(u, -period / 4) == doctest::Approx(3 * M_PI / 2));
    for (double t = -3.0; t < 3.0; t += 0.013) {
      const double p = phase_from_temperature(u, t);
      CHECK(p >= 0.0);
      CHECK(p < 2 * M_PI);
    }
  }

  TEST_CASE("UMI validation names the field") {
    UmiSpec u;
    u.delay_ns = 0.0;
    try {
      u.validate("franson.idler_umi");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.field() == "franson.idler_umi.delay_ns");
    }
  }
}
