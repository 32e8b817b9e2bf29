#include "qdemux/franson.hpp"

#include <cmath>

#include "qdemux/constants.hpp"
#include "qdemux/errors.hpp"

namespace qdemux {

void UmiSpec::validate(const std::string& field) const {
  if (!(delay_ns > 0.0)) throw ValidationError(field + ".delay_ns", "must be positive");
  if (!(wavelength_nm > 0.0)) throw ValidationError(field + ".wavelength_nm", "must be positive");
  if (!(medium.dn_dt > 0.0)) throw ValidationError(field + ".dn_dT", "must be positive");
  if (!(medium.refractive_index > 0.0)) throw ValidationError(field + ".refractive_index", "must be positive");
  if (!(medium.tunable_length_mm > 0.0)) throw ValidationError(field + ".tunable_length_mm", "must be positive");
}

double path_length_difference_mm(const UmiSpec& umi) {
  return kSpeedOfLight * umi.delay_ns * 1e-9 / (2.0 * umi.medium.refractive_index) * 1e3;
}

double temperature_tuning_period(const UmiSpec& umi) {
  if (!(umi.medium.dn_dt > 0.0)) throw DomainError("dn/dT must be positive");
  return umi.wavelength_nm * 1e-9 / (2.0 * umi.medium.tunable_length_mm * 1e-3 * umi.medium.dn_dt);
}

double tunable_length_for_period_mm(const UmiSpec& umi, double period_k) {
  if (!(period_k > 0.0)) throw DomainError("tuning period must be positive");
  return umi.wavelength_nm * 1e-9 / (2.0 * period_k * umi.medium.dn_dt) * 1e3;
}

double phase_from_temperature(const UmiSpec& umi, double t_k) {
  const double phase = kTwoPi * (t_k - umi.reference_temperature_k) / temperature_tuning_period(umi);
  double wrapped = std::fmod(phase, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  // Rounding can land a full period exactly on 2*pi.
  if (wrapped >= kTwoPi - 1e-12) wrapped = 0.0;
  return wrapped;
}

TuningPeriodCheck check_tuning_period(const UmiSpec& umi, double quoted_period_k, double tolerance_k) {
  TuningPeriodCheck check;
  check.computed_k = temperature_tuning_period(umi);
  check.quoted_k = quoted_period_k;
  check.implied_length_mm = tunable_length_for_period_mm(umi, quoted_period_k);
  check.consistent = std::abs(check.computed_k - quoted_period_k) <= tolerance_k;
  return check;
}

OutcomeDistribution outcome_distribution(const FringeModel& fringe) {
  if (!(fringe.visibility >= 0.0 && fringe.visibility <= 1.0)) throw DomainError("visibility must lie in [0, 1]");
  // Each photon reaches the analysed port through either arm with amplitude
  // 1/2. SS and LL arrive together and interfere; SL and LS are 1/16 each.
  OutcomeDistribution d;
  d.center = (1.0 + fringe.visibility * std::cos(fringe.total_phase())) / 8.0;
  d.early = 1.0 / 16.0;
  d.late = 1.0 / 16.0;
  d.lost = 1.0 - d.center - d.early - d.late;
  return d;
}

ExitDistribution exit_distribution(const FringeModel& fringe) {
  const OutcomeDistribution o = outcome_distribution(fringe);
  ExitDistribution e;
  e.both = o.center + o.early + o.late;
  e.signal_only = 0.5 - e.both;
  e.idler_only = 0.5 - e.both;
  e.neither = 1.0 - e.both - e.signal_only - e.idler_only;
  return e;
}

double fringe_expectation(const FringeModel& fringe, double base_rate) {
  if (!(base_rate >= 0.0)) throw DomainError("base rate must be non-negative");
  return base_rate * outcome_distribution(fringe).center / 0.25;
}

}  // namespace qdemux
