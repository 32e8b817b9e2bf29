#include <doctest.h>

#include <cmath>
#include <string>

#include "qdemux/errors.hpp"
#include "qdemux/sfg_converter.hpp"

using namespace qdemux;

namespace {

// Extraordinary index of 5 % MgO:CLN written out from the published form,
// independent of the library's coefficient table.
double gayer_ne(double l_um, double t_c) {
  const double f = (t_c - 24.5) * (t_c + 570.82);
  const double l2 = l_um * l_um;
  const double pole = 0.2020 + 6.113e-8 * f;
  return std::sqrt(5.756 + 2.860e-6 * f + (0.0983 + 4.700e-8 * f) / (l2 - pole * pole) +
                   (189.32 + 1.516e-4 * f) / (l2 - 12.52 * 12.52) - 1.32e-2 * l2);
}

double oracle_dk(double pump_nm, double signal_nm, double t_c, double period_um) {
  const double lp = pump_nm * 1e-3;
  const double ls = signal_nm * 1e-3;
  const double l3 = 1.0 / (1.0 / lp + 1.0 / ls);
  return 2.0 * M_PI * 1e6 *
         (gayer_ne(l3, t_c) / l3 - gayer_ne(lp, t_c) / lp - gayer_ne(ls, t_c) / ls - 1.0 / period_um);
}

CrystalSpec design_crystal() {
  CrystalSpec c;
  c.temperature_c = *solve_qpm_temperature(c, 795.0, 1560.0);
  return c;
}

}  // namespace

TEST_SUITE("sfg_converter") {
  TEST_CASE("energy conservation") {
    CHECK(sfg_wavelength_nm(795.0, 1560.0) == doctest::Approx(1.0 / (1.0 / 795.0 + 1.0 / 1560.0)));
    CHECK(sfg_wavelength_nm(795.0, 1560.0) == doctest::Approx(526.6).epsilon(1e-4));
    CHECK(sfg_wavelength_nm(1000.0, 1000.0) == doctest::Approx(500.0));
    CHECK(sfg_wavelength_nm(795.0, 1561.42) == doctest::Approx(1.0 / (1.0 / 795.0 + 1.0 / 1561.42)));
    CHECK_THROWS_AS(sfg_wavelength_nm(0.0, 1560.0), DomainError);
  }

  TEST_CASE("index model matches the written-out formula") {
    const auto s = gayer2008_mgo_cln();
    for (double l : {0.52, 0.795, 1.06, 1.56}) {
      for (double t : {20.0, 50.0, 100.0}) CHECK(s.index(l, t) == doctest::Approx(gayer_ne(l, t)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(s.index(0.3, 25.0), DomainError);
    CHECK_THROWS_AS(s.index(5.0, 25.0), DomainError);
  }

  TEST_CASE("index model reproduces the standard 1064 nm SHG period") {
    // Period that phase-matches 1064 -> 532 nm at 25 C; commercial MgO:PPLN uses ~6.9-7.0 um.
    const double n1 = gayer_ne(1.064, 25.0);
    const double n2 = gayer_ne(0.532, 25.0);
    const double period = 1.0 / (n2 / 0.532 - 2.0 * n1 / 1.064);
    CHECK(period == doctest::Approx(6.95).epsilon(0.01));
  }

  TEST_CASE("phase mismatch agrees with the independent oracle") {
    CrystalSpec c;
    for (double t : {25.0, 29.5, 76.0, 120.0}) {
      c.temperature_c = t;
      for (double pump : {790.0, 795.0, 800.0}) {
        for (double sig : {1540.0, 1560.0, 1580.0}) {
          CHECK(phase_mismatch(c, pump, sig) == doctest::Approx(oracle_dk(pump, sig, t, 7.3)).epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("temperature derivative sign agrees with the solved QPM temperature") {
    CrystalSpec c;
    c.temperature_c = 29.5;
    const double h = 0.5;
    const double slope = (oracle_dk(795.0, 1560.0, 29.5 + h, 7.3) - oracle_dk(795.0, 1560.0, 29.5 - h, 7.3)) / (2 * h);
    CrystalSpec hi = c;
    hi.temperature_c += 1e-3;
    CrystalSpec lo = c;
    lo.temperature_c -= 1e-3;
    const double lib_slope = (phase_mismatch(hi, 795.0, 1560.0) - phase_mismatch(lo, 795.0, 1560.0)) / 2e-3;
    CHECK((slope > 0) == (lib_slope > 0));
    // Newton direction: root lies on the side where dk heads to zero.
    const auto t = solve_qpm_temperature(c, 795.0, 1560.0);
    REQUIRE(t.has_value());
    const double dk0 = phase_mismatch(c, 795.0, 1560.0);
    CHECK(((*t - 29.5) * slope * dk0) < 0.0);
  }

  TEST_CASE("solved QPM temperature zeroes the mismatch") {
    const CrystalSpec c = design_crystal();
    CHECK(std::abs(phase_mismatch(c, 795.0, 1560.0)) < 1e-3);
    CHECK(std::abs(oracle_dk(795.0, 1560.0, c.temperature_c, 7.3)) < 1e-3);
  }

  TEST_CASE("thermal expansion dilates the poling period") {
    CrystalSpec c;
    c.thermal_expansion_per_k = 1.5e-5;
    CHECK(c.period_um_at(c.poling_reference_c) == doctest::Approx(7.3));
    CHECK(c.period_um_at(c.poling_reference_c + 100.0) == doctest::Approx(7.3 * (1.0 + 1.5e-3)));
    c.temperature_c = 76.0;
    CHECK(phase_mismatch(c, 795.0, 1560.0) ==
          doctest::Approx(oracle_dk(795.0, 1560.0, 76.0, c.period_um_at(76.0))).epsilon(1e-9));
  }

  TEST_CASE("acceptance bandwidth and adjacent-channel suppression") {
    const CrystalSpec c = design_crystal();
    CHECK(acceptance(c, 795.0, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    // FWHM by scanning the detuning.
    double lo = 0.0;
    double hi = 0.0;
    for (double d = 0.0; d < 200.0; d += 0.01) {
      if (acceptance(c, 795.0, d) < 0.5) {
        hi = d;
        break;
      }
    }
    for (double d = 0.0; d > -200.0; d -= 0.01) {
      if (acceptance(c, 795.0, d) < 0.5) {
        lo = d;
        break;
      }
    }
    const double fwhm = hi - lo;
    MESSAGE("acceptance FWHM ", fwhm, " GHz");
    CHECK(fwhm > 10.0);
    CHECK(fwhm < 100.0);
    CHECK(std::abs(hi + lo) < 0.05 * fwhm);
    // Envelope around the neighbouring channel, not a single sinc zero.
    double worst = 0.0;
    for (double d = 180.0; d <= 220.0; d += 0.1) {
      worst = std::max({worst, acceptance(c, 795.0, d), acceptance(c, 795.0, -d)});
    }
    MESSAGE("worst acceptance near 200 GHz: ", 10 * std::log10(worst), " dB");
    CHECK(worst <= 0.01);
    CHECK_THROWS_AS(acceptance(c, 795.0, 2500.0), DomainError);
  }

  TEST_CASE("acceptance is even in detuning near the peak") {
    const CrystalSpec c = design_crystal();
    for (double d : {1.0, 3.0, 5.0}) {
      CHECK(acceptance(c, 795.0, d) == doctest::Approx(acceptance(c, 795.0, -d)).epsilon(0.01));
    }
  }

  TEST_CASE("pump solutions for the three signal channels") {
    const CrystalSpec c = design_crystal();
    double previous = 1e9;
    for (int ch : {24, 22, 20}) {
      const ItuChannel signal = ItuChannel::from_index(ch);
      const double pump = solve_pump_wavelength(c, signal);
      CAPTURE(ch);
      CHECK(pump >= 790.0);
      CHECK(pump <= 800.0);
      CHECK(std::abs(phase_mismatch(c, pump, signal.center_wavelength_nm())) < 1.0);
      CHECK(pump < previous);  // longer signal wavelength, shorter pump
      previous = pump;
    }
  }

  TEST_CASE("design signal returns the design pump") {
    const CrystalSpec c = design_crystal();
    CHECK(solve_pump_wavelength(c, 1560.0) == doctest::Approx(795.0).epsilon(1e-9));
    CHECK(phase_matched_signal_nm(c, 795.0) == doctest::Approx(1560.0).epsilon(1e-9));
  }

  TEST_CASE("unaddressable channel reports the temperature") {
    CrystalSpec c;
    c.temperature_c = 29.5;
    PumpTuningWindow narrow{799.0, 800.0};
    try {
      solve_pump_wavelength(c, ItuChannel::from_index(22), narrow);
      FAIL("expected DomainError");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("channel unaddressable at this temperature") != std::string::npos);
    }
  }

  TEST_CASE("conversion curve calibration") {
    const ConversionCurve curve = ConversionCurve::calibrated(550.0, 0.38);
    CHECK(curve.p_pi_mw == doctest::Approx(3076.0).epsilon(1e-3));
    CHECK(quantum_efficiency(curve, 550.0) == doctest::Approx(0.38).epsilon(1e-12));
    CHECK(quantum_efficiency(curve, 0.0) == 0.0);
    CHECK(quantum_efficiency(curve, curve.p_pi_mw) == doctest::Approx(curve.eta_device));
    const ConversionCurve ceiling = ConversionCurve::calibrated(550.0, 0.38, 0.8);
    CHECK(quantum_efficiency(ceiling, ceiling.p_pi_mw) == doctest::Approx(0.8));
    CHECK_THROWS_AS(quantum_efficiency(curve, -1.0), DomainError);
    CHECK_THROWS_AS(ConversionCurve::calibrated(550.0, 0.9, 0.8), DomainError);
  }

  TEST_CASE("conversion curve is monotone and concave near p_pi") {
    const ConversionCurve curve = ConversionCurve::calibrated(550.0, 0.38);
    double last = -1.0;
    for (double p = 0.0; p <= curve.p_pi_mw; p += curve.p_pi_mw / 500.0) {
      const double q = quantum_efficiency(curve, p);
      CHECK(q >= last);
      last = q;
    }
    const double h = 10.0;
    const double p = 0.9 * curve.p_pi_mw;
    CHECK(quantum_efficiency(curve, p + h) - 2 * quantum_efficiency(curve, p) + quantum_efficiency(curve, p - h) < 0.0);
  }

  TEST_CASE("power and quantum efficiency conversions") {
    CHECK(power_efficiency(0.38, 1560.0, 525.0) == doctest::Approx(0.38 * 1560.0 / 525.0));
    CHECK(power_efficiency(0.38, 1560.0, 525.0) == doctest::Approx(1.129).epsilon(1e-3));
    CHECK(power_efficiency(0.0, 1560.0, 525.0) == 0.0);
    CHECK(power_efficiency(0.3, 800.0, 800.0) == 0.3);
    for (double q : {0.01, 0.2, 0.38, 0.99}) {
      const double sfg = sfg_wavelength_nm(795.0, 1560.0);
      CHECK(std::abs(quantum_from_power_efficiency(power_efficiency(q, 1560.0, sfg), 1560.0, sfg) - q) <= 1e-12);
    }
  }
}
