#include "qdemux/ring_source.hpp"

#include <cmath>

#include <fmt/core.h>

#include "qdemux/constants.hpp"
#include "qdemux/errors.hpp"

namespace qdemux {

void RingSpectrumModel::validate() const {
  if (!(fsr_ghz > 0.0)) throw ValidationError("ring.fsr_GHz", "must be positive");
  if (!(fwhm_mhz > 0.0)) throw ValidationError("ring.fwhm_MHz", "must be positive");
  if (!(fsr_ghz * 1e3 > 10.0 * fwhm_mhz)) {
    throw ValidationError("ring.fwhm_MHz", "linewidth must be much smaller than the FSR");
  }
  if (!(extinction_depth > 0.0 && extinction_depth <= 1.0)) {
    throw ValidationError("ring.extinction_depth", "must lie in (0, 1]");
  }
  if (!(reference_resonance_thz > 0.0)) throw ValidationError("ring.reference_resonance_THz", "must be positive");
  if (!(q_factor > 0.0)) throw ValidationError("ring.q_factor", "must be positive");
}

double RingSpectrumModel::resonance_thz(long m) const {
  return reference_resonance_thz + (static_cast<double>(m) * fsr_ghz + thermo_optic_shift_ghz_per_k * temperature_k) * 1e-3;
}

double RingSpectrumModel::nearest_resonance_thz(double frequency_thz) const {
  const double base = resonance_thz(0);
  const long m = std::lround((frequency_thz - base) / (fsr_ghz * 1e-3));
  return resonance_thz(m);
}

double RingSpectrumModel::implied_q() const { return reference_resonance_thz * 1e6 / fwhm_mhz; }

namespace {

// Lorentzian of unit peak, detuning from the nearest comb line.
double lorentzian(const RingSpectrumModel& model, double frequency_thz) {
  const double detuning_mhz = (frequency_thz - model.nearest_resonance_thz(frequency_thz)) * 1e6;
  const double half_width = 0.5 * model.fwhm_mhz;
  return half_width * half_width / (detuning_mhz * detuning_mhz + half_width * half_width);
}

}  // namespace

double transmission(const RingSpectrumModel& model, double frequency_thz) {
  return 1.0 - model.extinction_depth * lorentzian(model, frequency_thz);
}

double resonance_enhancement(const RingSpectrumModel& model, double frequency_thz) {
  return lorentzian(model, frequency_thz);
}

double biphoton_coherence_time_ps(const RingSpectrumModel& model) {
  return 1.0 / (kTwoPi * model.fwhm_mhz * 1e6) * kPsPerSecond;
}

void SfwmRates::validate() const {
  if (!(pair_coefficient >= 0.0)) throw ValidationError("sfwm.pair_coefficient", "must be non-negative");
  if (!(raman_signal >= 0.0)) throw ValidationError("sfwm.raman_coefficient_signal", "must be non-negative");
  if (!(raman_idler >= 0.0)) throw ValidationError("sfwm.raman_coefficient_idler", "must be non-negative");
  if (!(enhancement >= 0.0)) throw ValidationError("sfwm.enhancement", "must be non-negative");
}

double pair_rate(const SfwmRates& rates, double pump_uw) {
  if (!(pump_uw >= 0.0)) throw DomainError(fmt::format("pump power {} uW is negative", pump_uw));
  return rates.enhancement * rates.pair_coefficient * pump_uw * pump_uw;
}

double singles_rate(const SfwmRates& rates, double pump_uw, Arm side, double efficiency, double dark_rate) {
  const double photons = pair_rate(rates, pump_uw) + rates.raman(side) * pump_uw;
  return efficiency * photons + dark_rate;
}

double pair_coefficient_for_detected_rate(double detected_rate, double arm_efficiency, double pump_uw) {
  if (!(arm_efficiency > 0.0) || !(pump_uw > 0.0)) {
    throw DomainError("efficiency and pump power must be positive to back-solve the pair coefficient");
  }
  return detected_rate / (arm_efficiency * pump_uw * pump_uw);
}

double raman_coefficient_for_fraction(double pair_coefficient, double fraction, double pump_uw) {
  return fraction * pair_coefficient * pump_uw;
}

}  // namespace qdemux
