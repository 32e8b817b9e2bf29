#include "qdemux/sfg_converter.hpp"

#include <cmath>
#include <functional>

#include <fmt/core.h>

#include "qdemux/constants.hpp"
#include "qdemux/errors.hpp"

namespace qdemux {
namespace {

double sinc2(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 3.0;
  const double s = std::sin(x) / x;
  return s * s;
}

// Bisection on a bracketed sign change of f over [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// First sign change of f scanning [lo, hi] at `step`; nullopt if none.
std::optional<std::pair<double, double>> bracket(const std::function<double(double)>& f, double lo, double hi,
                                                 double step) {
  const auto n = static_cast<long>(std::ceil((hi - lo) / step));
  double x0 = lo;
  double f0 = f(x0);
  if (f0 == 0.0) return std::pair{x0, x0};
  for (long i = 1; i <= n; ++i) {
    const double x1 = std::min(hi, lo + static_cast<double>(i) * step);
    const double f1 = f(x1);
    if (f1 == 0.0 || (f1 < 0.0) != (f0 < 0.0)) return std::pair{x0, x1};
    x0 = x1;
    f0 = f1;
  }
  return std::nullopt;
}

}  // namespace

void CrystalSpec::validate() const {
  if (!(length_mm > 0.0)) throw ValidationError("sfg.crystal.length_mm", "must be positive");
  if (!(poling_period_um > 0.0)) throw ValidationError("sfg.crystal.poling_period_um", "must be positive");
  if (!std::isfinite(temperature_c)) throw ValidationError("sfg.crystal.temperature_C", "must be finite");
}

double CrystalSpec::period_um_at(double t_c) const {
  return poling_period_um * (1.0 + thermal_expansion_per_k * (t_c - poling_reference_c));
}

void PumpLaser::validate() const {
  if (!(power_mw >= 0.0)) throw ValidationError("sfg.pump_power_mW", "must be non-negative");
  if (!(window.min_nm < window.max_nm)) throw ValidationError("sfg.tuning_window_nm", "min must be below max");
  if (!window.contains(wavelength_nm)) {
    throw ValidationError("sfg.pump_nm", fmt::format("{} nm outside tuning window [{}, {}] nm", wavelength_nm,
                                                     window.min_nm, window.max_nm));
  }
}

void ConversionCurve::validate() const {
  if (!(eta_device > 0.0 && eta_device <= 1.0)) throw ValidationError("sfg.conversion.eta_device", "must lie in (0, 1]");
  if (!(p_pi_mw > 0.0)) throw ValidationError("sfg.conversion.p_pi_mW", "must be positive");
}

ConversionCurve ConversionCurve::calibrated(double power_mw, double quantum_efficiency, double eta_device) {
  if (!(power_mw > 0.0)) throw DomainError("calibration power must be positive");
  if (!(quantum_efficiency > 0.0 && quantum_efficiency <= eta_device)) {
    throw DomainError("calibration efficiency must lie in (0, eta_device]");
  }
  // (pi/2) sqrt(P / p_pi) = asin(sqrt(eta / eta_device)) on the rising branch.
  const double arg = std::asin(std::sqrt(quantum_efficiency / eta_device));
  const double ratio = arg / (0.5 * kPi);
  return ConversionCurve{eta_device, power_mw / (ratio * ratio)};
}

double sfg_wavelength_nm(double pump_nm, double signal_nm) {
  if (!(pump_nm > 0.0) || !(signal_nm > 0.0)) throw DomainError("wavelengths must be positive");
  return 1.0 / (1.0 / pump_nm + 1.0 / signal_nm);
}

double phase_mismatch(const CrystalSpec& crystal, double pump_nm, double signal_nm) {
  const double sfg_nm = sfg_wavelength_nm(pump_nm, signal_nm);
  const double t = crystal.temperature_c;
  const auto& s = crystal.sellmeier;
  const double lp = pump_nm * 1e-3;
  const double ls = signal_nm * 1e-3;
  const double l3 = sfg_nm * 1e-3;
  // Per-um wavenumbers, then to rad/m.
  const double dk_per_um = s.index(l3, t) / l3 - s.index(lp, t) / lp - s.index(ls, t) / ls -
                           1.0 / crystal.period_um_at(t);
  return kTwoPi * dk_per_um * 1e6;
}

double relative_efficiency(const CrystalSpec& crystal, double pump_nm, double signal_nm) {
  const double dk = phase_mismatch(crystal, pump_nm, signal_nm);
  return sinc2(0.5 * dk * crystal.length_mm * 1e-3);
}

double phase_matched_signal_nm(const CrystalSpec& crystal, double pump_nm) {
  auto f = [&](double signal_nm) { return phase_mismatch(crystal, pump_nm, signal_nm); };
  const auto br = bracket(f, 1400.0, 1700.0, 0.5);
  if (!br) throw DomainError(fmt::format("no phase-matched signal in 1400-1700 nm for pump {:.4f} nm", pump_nm));
  return bisect(f, br->first, br->second, 1e-10);
}

double acceptance(const CrystalSpec& crystal, double pump_nm, double signal_detuning_ghz) {
  if (std::abs(signal_detuning_ghz) > 2000.0) {
    throw DomainError(fmt::format("signal detuning {} GHz exceeds +/-2 THz", signal_detuning_ghz));
  }
  const double matched_thz = wavelength_to_frequency_thz(phase_matched_signal_nm(crystal, pump_nm));
  const double signal_nm = frequency_to_wavelength_nm(matched_thz + signal_detuning_ghz * 1e-3);
  return relative_efficiency(crystal, pump_nm, signal_nm);
}

double solve_pump_wavelength(const CrystalSpec& crystal, double signal_nm, const PumpTuningWindow& window) {
  auto f = [&](double pump_nm) { return phase_mismatch(crystal, pump_nm, signal_nm); };
  const auto br = bracket(f, window.min_nm, window.max_nm, 0.01);
  if (!br) {
    throw DomainError(fmt::format(
        "channel unaddressable at this temperature: no phase-matching pump for signal {:.2f} nm in [{}, {}] nm "
        "at {:.2f} C",
        signal_nm, window.min_nm, window.max_nm, crystal.temperature_c));
  }
  // Bisect well below 1e-4 nm so |Delta-k| < 1 rad/m holds.
  return bisect(f, br->first, br->second, 1e-10);
}

double solve_pump_wavelength(const CrystalSpec& crystal, const ItuChannel& signal, const PumpTuningWindow& window) {
  return solve_pump_wavelength(crystal, signal.center_wavelength_nm(), window);
}

std::optional<double> solve_qpm_temperature(const CrystalSpec& crystal, double pump_nm, double signal_nm,
                                            double min_c, double max_c) {
  CrystalSpec probe = crystal;
  auto f = [&](double t_c) {
    probe.temperature_c = t_c;
    return phase_mismatch(probe, pump_nm, signal_nm);
  };
  const auto br = bracket(f, min_c, max_c, 0.1);
  if (!br) return std::nullopt;
  return bisect(f, br->first, br->second, 1e-9);
}

double quantum_efficiency(const ConversionCurve& curve, double pump_power_mw) {
  if (!(pump_power_mw >= 0.0)) throw DomainError(fmt::format("pump power {} mW is negative", pump_power_mw));
  const double s = std::sin(0.5 * kPi * std::sqrt(pump_power_mw / curve.p_pi_mw));
  return curve.eta_device * s * s;
}

double power_efficiency(double quantum_eff, double signal_nm, double sfg_nm) {
  if (!(signal_nm > 0.0) || !(sfg_nm > 0.0)) throw DomainError("wavelengths must be positive");
  return quantum_eff * signal_nm / sfg_nm;
}

double quantum_from_power_efficiency(double power_eff, double signal_nm, double sfg_nm) {
  if (!(signal_nm > 0.0) || !(sfg_nm > 0.0)) throw DomainError("wavelengths must be positive");
  return power_eff * sfg_nm / signal_nm;
}

}  // namespace qdemux
