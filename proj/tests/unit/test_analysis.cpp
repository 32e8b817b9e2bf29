#include <doctest.h>

#include <cmath>
#include <vector>

#include "qdemux/analysis.hpp"
#include "qdemux/constants.hpp"
#include "qdemux/errors.hpp"

using namespace qdemux;

namespace {

// Four quadrature points of A (1 + V cos phi) with integer counts.
FringeScan quadrature_scan(std::uint64_t a, std::uint64_t av, std::uint64_t background) {
  FringeScan scan;
  const std::uint64_t counts[4] = {a + av, a, a - av, a};
  for (int i = 0; i < 4; ++i) {
    scan.points.push_back({kPi / 2.0 * i, counts[i] + background, static_cast<double>(background), 1.0});
  }
  return scan;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("sinusoid fit recovers exact parameters") {
    for (const double v : {0.3, 0.9622, 0.999}) {
      const double a = 1234.5;
      const double phi0 = 0.7;
      std::vector<double> ph, c, var;
      for (int i = 0; i < 8; ++i) {
        const double p = kTwoPi * i / 8.0;
        ph.push_back(p);
        c.push_back(a * (1.0 + v * std::cos(p + phi0)));
        var.push_back(c.back());
      }
      const SinusoidFit fit = fit_sinusoid(ph, c, var);
      CHECK(fit.amplitude == doctest::Approx(a).epsilon(1e-9));
      CHECK(std::abs(fit.visibility - v) < 1e-6);
      CHECK(std::abs(std::remainder(fit.phase_offset - phi0, kTwoPi)) < 1e-6);
    }
  }

  TEST_CASE("min/max visibility and its Poisson error") {
    const Estimate e = minmax_visibility(100.0, 25.0);
    CHECK(e.value == doctest::Approx(0.6));
    const double oracle = 2.0 * std::sqrt(100.0 * 100.0 * 25.0 + 25.0 * 25.0 * 100.0) / (125.0 * 125.0);
    CHECK(e.sigma == doctest::Approx(oracle));
    CHECK(e.sigma == doctest::Approx(0.0716).epsilon(1e-3));
  }

  TEST_CASE("no background: net equals raw") {
    const VisibilityResult r = fit_visibility(quadrature_scan(1000, 500, 0));
    CHECK(r.raw.value == doctest::Approx(0.5));
    CHECK(r.net.value == doctest::Approx(r.raw.value));
    CHECK(r.net.sigma == doctest::Approx(r.raw.sigma));
    CHECK_FALSE(r.clamped);
  }

  TEST_CASE("background lowers raw visibility and leaves net unchanged") {
    const VisibilityResult clean = fit_visibility(quadrature_scan(1000, 500, 0));
    const VisibilityResult noisy = fit_visibility(quadrature_scan(1000, 500, 200));
    CHECK(noisy.raw.value == doctest::Approx(500.0 / 1200.0));
    CHECK(noisy.raw.value < clean.raw.value);
    CHECK(noisy.net.value == doctest::Approx(clean.net.value).epsilon(1e-9));
  }

  TEST_CASE("visibility error scales as one over root counts") {
    const VisibilityResult small = fit_visibility(quadrature_scan(1000, 500, 0));
    const VisibilityResult large = fit_visibility(quadrature_scan(4000, 2000, 0));
    CHECK(large.raw.value == doctest::Approx(small.raw.value));
    CHECK(std::abs(large.raw.sigma / small.raw.sigma - 0.5) < 0.05 * 0.5);
  }

  TEST_CASE("degenerate flat scan gives zero visibility") {
    const VisibilityResult r = fit_visibility(quadrature_scan(1000, 0, 0));
    CHECK(std::abs(r.raw.value) < 1e-12);
    CHECK_FALSE(r.bell_violating);
  }

  TEST_CASE("Bell flag uses net minus sigma") {
    CHECK(fit_visibility(quadrature_scan(100000, 95000, 0)).bell_violating);
    CHECK_FALSE(fit_visibility(quadrature_scan(100000, 60000, 0)).bell_violating);
  }

  TEST_CASE("scan validation") {
    FringeScan scan;
    scan.points.push_back({0.0, 10, 0.0, 1.0});
    scan.points.push_back({0.1, 10, 0.0, 1.0});
    CHECK_THROWS(fit_visibility(scan));
  }

  TEST_CASE("CAR without background is a lower bound") {
    CoincidenceHistogram h(32, 20'000);
    h.counts[static_cast<std::size_t>(h.half_bins())] = 50;
    const CarEstimate e = car_from_histogram(h, 0.8);
    CHECK(e.lower_bound);
    CHECK(e.center == 50);
    CHECK(e.car > 0.0);
  }

  TEST_CASE("CAR from a flat floor plus a peak") {
    CoincidenceHistogram h(32, 20'000);
    std::fill(h.counts.begin(), h.counts.end(), 2);
    h.counts[static_cast<std::size_t>(h.half_bins())] += 950;
    const CarEstimate e = car_from_histogram(h, 0.8);
    CHECK_FALSE(e.lower_bound);
    // 25-bin window: (950 + 50) / 50
    CHECK(e.car == doctest::Approx(20.0));
  }

  TEST_CASE("report formatting") {
    CHECK(format_percent({0.9943, 0.0012}) == "(99.43 ± 0.12) %");
    ReportRow row{"S2-I2", std::nullopt, fit_visibility(quadrature_scan(1000, 500, 0))};
    const std::string text = visibility_report({row});
    CHECK(text.find("S2-I2") != std::string::npos);
    CHECK(text.find("After QFC") != std::string::npos);
    const auto j = visibility_report_json({row});
    CHECK(j.is_array());
    CHECK(j.size() == 1);
  }
}
