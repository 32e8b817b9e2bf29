#pragma once

// Franson arrangement: one unbalanced Michelson interferometer (UMI) per
// photon. Post-selecting zero relative delay keeps the short-short and
// long-long amplitudes, which interfere with total phase
// phi_s + phi_i + phi_0.

#include <string>

namespace qdemux {

struct TuningMedium {
  double dn_dt = 0.811e-5;          // 1/K
  double refractive_index = 1.467;  // sets the path difference c*dt/(2n)
  double tunable_length_mm = 163.48;
};

struct UmiSpec {
  std::string label = "fiber";
  double delay_ns = 1.6;
  double wavelength_nm = 1550.0;
  TuningMedium medium{};
  double reference_temperature_k = 0.0;

  void validate(const std::string& field) const;
};

/// Arm length difference L_d = c * delay / (2 n) in mm.
double path_length_difference_mm(const UmiSpec& umi);

/// Temperature change for a 2*pi phase step: lambda / (2 L dn/dT).
double temperature_tuning_period(const UmiSpec& umi);

/// Tunable length that reproduces `period_k` with the UMI's wavelength and dn/dT.
double tunable_length_for_period_mm(const UmiSpec& umi, double period_k);

/// Interferometer phase at temperature `t_k`, wrapped to [0, 2*pi).
double phase_from_temperature(const UmiSpec& umi, double t_k);

/// Compares the formula against a quoted tuning period.
struct TuningPeriodCheck {
  double computed_k = 0.0;
  double quoted_k = 0.0;
  double implied_length_mm = 0.0;  // length that would give quoted_k
  bool consistent = false;
};
TuningPeriodCheck check_tuning_period(const UmiSpec& umi, double quoted_period_k, double tolerance_k);

struct FringeModel {
  double visibility = 1.0;
  double phase_offset = 0.0;
  double signal_phase = 0.0;
  double idler_phase = 0.0;

  double total_phase() const { return signal_phase + idler_phase + phase_offset; }
};

/// Coincidence classes for one pair entering both UMIs. `early`/`late` are the
/// +/-delay side peaks; `lost` covers every outcome where at least one photon
/// leaves through the unanalysed port.
struct OutcomeDistribution {
  double center = 0.0;
  double early = 0.0;
  double late = 0.0;
  double lost = 0.0;
};

OutcomeDistribution outcome_distribution(const FringeModel& fringe);

/// Per-photon view of the same distribution: probability that both, only one,
/// or neither photon reach the analysed ports. Each marginal is 1/2
/// independent of phase, so singles carry no fringe.
struct ExitDistribution {
  double both = 0.0;
  double signal_only = 0.0;
  double idler_only = 0.0;
  double neither = 0.0;
};

ExitDistribution exit_distribution(const FringeModel& fringe);

/// Central-peak coincidence rate normalized so V0 = 1, phase 0 gives base_rate.
double fringe_expectation(const FringeModel& fringe, double base_rate);

}  // namespace qdemux
