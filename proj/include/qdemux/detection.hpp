#pragma once

// Loss ledgers, detector models, accidental-coincidence arithmetic and the
// analytic coincidence-to-accidental ratio.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdemux/event_stream.hpp"
#include "qdemux/ring_source.hpp"

namespace qdemux {

double db_to_linear(double loss_db);
double linear_to_db(double transmission);

enum class LossKind {
  passive,     // fixed insertion loss
  conversion,  // up-conversion; replaced by the conversion model in simulation
  detector,    // detection efficiency; applied by the detector stage in simulation
};

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& s);

struct LossEntry {
  std::string name;
  double loss_db = 0.0;
  LossKind kind = LossKind::passive;
  std::string group;  // e.g. "chip", "sfg-module"; used for sub-totals

  friend bool operator==(const LossEntry&, const LossEntry&) = default;
};

struct LossLedger {
  std::string role;  // "signal-arm" | "idler-arm"
  std::vector<LossEntry> entries;

  void validate(const std::string& field) const;
  /// Copy with the conversion entries replaced by one computed entry.
  LossLedger with_conversion(double conversion_efficiency) const;
  LossLedger without(LossKind kind) const;
  LossLedger group(const std::string& name) const;
};

struct LedgerTotal {
  double total_db = 0.0;
  double linear = 1.0;
};

/// Throws ValidationError on a negative entry.
LedgerTotal ledger_total(const LossLedger& ledger);

struct DetectorSpec {
  std::string name;
  double efficiency = 1.0;
  double dark_rate = 0.0;  // counts/s
  double dead_time_us = 0.0;
  double jitter_sigma_ps = 0.0;

  void validate(const std::string& field) const;
};

struct CoincidenceConfig {
  double window_ns = 0.8;
  double histogram_bin_ps = 32.0;
  double histogram_span_ns = 20.0;

  /// Window and span must be whole multiples of the bin; the window an odd
  /// multiple so it is symmetric about zero delay.
  void validate() const;
  Picoseconds window_ps() const;
  Picoseconds bin_ps() const;
  Picoseconds span_ps() const;
};

/// Flat two-fold accidental rate singles_a * singles_b * window.
double accidental_rate(double singles_a, double singles_b, double window_ns);

/// One detection arm: everything between the source and the detector, plus
/// the detector itself.
struct ArmModel {
  LossLedger ledger;  // detector entries are ignored; efficiency comes from `detector`
  DetectorSpec detector;

  double efficiency() const;
};

/// Fraction of true coincidences whose recorded delay falls inside a
/// centred window: double-exponential pair delay (time constant
/// `coherence_ps`, truncated at `truncation` constants) convolved with
/// Gaussian timing jitter of total sigma `jitter_sigma_ps`.
double coincidence_window_capture(double coherence_ps, double jitter_sigma_ps, double window_ps,
                                  double truncation = 5.0);

struct CarModel {
  SfwmRates source;
  ArmModel arm_a;
  Arm side_a = Arm::signal;
  ArmModel arm_b;
  Arm side_b = Arm::idler;
  double window_ns = 0.8;
  double capture = 1.0;              // window capture fraction of true coincidences
  bool dead_time_correction = false; // non-paralyzable live-time factor 1/(1 + r tau) per arm
};

struct CarPoint {
  double true_rate = 0.0;
  double accidental_rate = 0.0;
  double singles_a = 0.0;
  double singles_b = 0.0;
  std::optional<double> car;  // undefined when the accidental rate is zero
};

CarPoint car_point(const CarModel& model, double pump_uw);

/// C_true / A at `pump_uw`; nullopt when A = 0.
std::optional<double> car_curve(const CarModel& model, double pump_uw);

/// Thinning at the efficiency, Gaussian timing jitter, Poisson dark counts,
/// then non-paralyzable dead time. Output is strictly increasing and within
/// [0, duration]. Throws ValidationError on unsorted input.
EventStream apply_detector(const EventStream& stream, const DetectorSpec& spec, std::uint64_t seed);

}  // namespace qdemux
