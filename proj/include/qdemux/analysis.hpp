#pragma once

// Fringe visibility (raw and dark-subtracted), Poisson error propagation,
// Bell-threshold flagging and CAR estimation from coincidence histograms.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdemux/histogram.hpp"

namespace qdemux {

inline constexpr double kBellVisibilityThreshold = 0.70710678118654752;  // 1/sqrt(2)

struct FringePoint {
  double phase_rad = 0.0;
  std::uint64_t center_counts = 0;
  double background_counts = 0.0;  // far-window estimate, per window width
  double accumulation_s = 1.0;
};

struct FringeScan {
  std::vector<FringePoint> points;

  /// At least 4 points spanning more than pi of phase.
  void validate() const;
};

struct Estimate {
  double value = 0.0;
  double sigma = 0.0;
};

/// Least-squares fit of C(phi) = A (1 + V cos(phi + phi0)).
struct SinusoidFit {
  double amplitude = 0.0;  // A
  double visibility = 0.0;
  double phase_offset = 0.0;
  double visibility_sigma = 0.0;
  double amplitude_sigma = 0.0;
};

/// Linear-in-parameters fit (A, A V cos phi0, -A V sin phi0), refined by a
/// fixed number of variance-weighted passes. Errors propagate the per-point
/// variances in `variances` through the final linear estimator.
SinusoidFit fit_sinusoid(const std::vector<double>& phases, const std::vector<double>& counts,
                         const std::vector<double>& variances);

/// (Nmax - Nmin) / (Nmax + Nmin) with Poisson error
/// 2 sqrt(Nmax^2 Nmin + Nmin^2 Nmax) / (Nmax + Nmin)^2.
Estimate minmax_visibility(double n_max, double n_min);

struct VisibilityResult {
  Estimate raw;
  Estimate net;
  Estimate raw_minmax;
  Estimate net_minmax;
  bool bell_violating = false;   // net - sigma > 1/sqrt(2)
  bool clamped = false;          // some background-subtracted point went negative
  bool estimators_disagree = false;  // fit and min/max differ by more than 1 sigma
  double fit_phase_offset = 0.0;
  double fit_amplitude = 0.0;
};

/// Net visibility subtracts the scan-pooled far background (scaled to each
/// point's accumulation time) from every point before fitting.
VisibilityResult fit_visibility(const FringeScan& scan);

struct CarEstimate {
  double car = 0.0;
  double sigma = 0.0;
  bool lower_bound = false;  // no far-background counts; one count assumed
  std::uint64_t center = 0;
  std::uint64_t background_raw = 0;
};

/// Raw center-window counts over the far background per equal window.
CarEstimate car_from_histogram(const CoincidenceHistogram& h, double window_ns, double side_delay_ns = 1.6);

struct ReportRow {
  std::string label;
  std::optional<VisibilityResult> before;
  std::optional<VisibilityResult> after;
};

std::string format_percent(const Estimate& e);

/// Aligned text table in the "before / after conversion" raw+net layout.
std::string visibility_report(const std::vector<ReportRow>& rows);
nlohmann::json visibility_report_json(const std::vector<ReportRow>& rows);
nlohmann::json to_json(const VisibilityResult& v);

}  // namespace qdemux
