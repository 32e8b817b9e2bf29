#pragma once

// Silicon microring pair source: all-pass notch spectrum with a thermally
// tunable resonance comb, and the SFWM pair / Raman noise rate laws.

namespace qdemux {

struct RingSpectrumModel {
  double fsr_ghz = 200.0;
  double fwhm_mhz = 490.0;
  double q_factor = 430'000.0;  // descriptive only; fwhm drives every calculation
  double extinction_depth = 0.9;
  double reference_resonance_thz = 193.4;
  double thermo_optic_shift_ghz_per_k = 10.0;
  double temperature_k = 0.0;  // offset from the reference temperature

  void validate() const;

  /// Comb line m, including the thermal shift.
  double resonance_thz(long m) const;
  double nearest_resonance_thz(double frequency_thz) const;
  /// Resonance frequency / FWHM at the reference resonance.
  double implied_q() const;
};

/// Fractional bus-waveguide transmission at `frequency_thz`.
double transmission(const RingSpectrumModel& model, double frequency_thz);

/// Lorentzian intracavity power enhancement at `frequency_thz` relative to
/// line centre (1 on resonance).
double resonance_enhancement(const RingSpectrumModel& model, double frequency_thz);

/// Relative signal-idler delay constant of cavity-filtered pairs: the
/// intensity decay time 1/(2*pi*FWHM) of the ring mode, in ps.
double biphoton_coherence_time_ps(const RingSpectrumModel& model);

enum class Arm { signal, idler };

struct SfwmRates {
  double pair_coefficient = 0.0;  // pairs/s per uW^2
  double raman_signal = 0.0;      // counts/s per uW
  double raman_idler = 0.0;       // counts/s per uW
  double enhancement = 1.0;

  void validate() const;
  double raman(Arm side) const { return side == Arm::signal ? raman_signal : raman_idler; }
};

double pair_rate(const SfwmRates& rates, double pump_uw);

/// Detected singles: efficiency * (pairs + Raman) + dark.
double singles_rate(const SfwmRates& rates, double pump_uw, Arm side, double efficiency, double dark_rate);

/// Pair coefficient that yields `detected_rate` singles from pairs alone
/// through an arm of total efficiency `arm_efficiency` at `pump_uw`.
double pair_coefficient_for_detected_rate(double detected_rate, double arm_efficiency, double pump_uw);

/// Raman coefficient giving noise singles equal to `fraction` of the SFWM
/// singles at `pump_uw`.
double raman_coefficient_for_fraction(double pair_coefficient, double fraction, double pump_uw);

}  // namespace qdemux
