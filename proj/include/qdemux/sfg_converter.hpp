#pragma once

// Type-0 quasi-phase-matched sum-frequency conversion in a PPLN crystal:
// phase mismatch, sinc^2 acceptance, pump-wavelength channel addressing and
// the pump-power conversion law.

#include <optional>

#include "qdemux/channel_plan.hpp"
#include "qdemux/sellmeier.hpp"

namespace qdemux {

struct CrystalSpec {
  double length_mm = 50.0;
  double poling_period_um = 7.3;
  double temperature_c = 29.5;
  SellmeierSet sellmeier = gayer2008_mgo_cln();
  double thermal_expansion_per_k = 0.0;
  double poling_reference_c = 25.0;  // temperature at which poling_period_um holds

  void validate() const;
  double period_um_at(double temperature_c) const;
};

struct PumpTuningWindow {
  double min_nm = 790.0;
  double max_nm = 800.0;

  bool contains(double nm) const { return nm >= min_nm && nm <= max_nm; }
};

struct PumpLaser {
  double wavelength_nm = 795.0;
  double power_mw = 400.0;
  PumpTuningWindow window{};

  void validate() const;
};

/// eta_q(P) = eta_device * sin^2((pi/2) sqrt(P / p_pi)).
struct ConversionCurve {
  double eta_device = 1.0;
  double p_pi_mw = 3075.5;

  void validate() const;
  /// Curve through a single measured (power, efficiency) point.
  static ConversionCurve calibrated(double power_mw, double quantum_efficiency, double eta_device = 1.0);
};

double sfg_wavelength_nm(double pump_nm, double signal_nm);

/// Delta-k in rad/m at the crystal temperature.
double phase_mismatch(const CrystalSpec& crystal, double pump_nm, double signal_nm);

/// sinc^2(Delta-k L / 2) for an arbitrary pump/signal combination.
double relative_efficiency(const CrystalSpec& crystal, double pump_nm, double signal_nm);

/// Signal wavelength phase-matched to `pump_nm`, searched over 1400-1700 nm.
double phase_matched_signal_nm(const CrystalSpec& crystal, double pump_nm);

/// Relative efficiency for a signal detuned by `signal_detuning_ghz` from the
/// phase-matched signal of `pump_nm`. |detuning| must not exceed 2 THz.
double acceptance(const CrystalSpec& crystal, double pump_nm, double signal_detuning_ghz);

/// Pump wavelength inside `window` that phase-matches the signal: 0.01 nm
/// bracketing scan then bisection. The smallest-wavelength root wins.
/// Throws DomainError("channel unaddressable at this temperature ...") when
/// no sign change is bracketed.
double solve_pump_wavelength(const CrystalSpec& crystal, double signal_nm, const PumpTuningWindow& window = {});
double solve_pump_wavelength(const CrystalSpec& crystal, const ItuChannel& signal, const PumpTuningWindow& window = {});

/// Crystal temperature phase-matching (pump, signal), searched in [min_c, max_c].
std::optional<double> solve_qpm_temperature(const CrystalSpec& crystal, double pump_nm, double signal_nm,
                                            double min_c = -20.0, double max_c = 200.0);

double quantum_efficiency(const ConversionCurve& curve, double pump_power_mw);

/// eta_power = eta_quantum * lambda_signal / lambda_sfg.
double power_efficiency(double quantum_eff, double signal_nm, double sfg_nm);
/// eta_quantum = eta_power * lambda_sfg / lambda_signal.
double quantum_from_power_efficiency(double power_eff, double signal_nm, double sfg_nm);

}  // namespace qdemux
