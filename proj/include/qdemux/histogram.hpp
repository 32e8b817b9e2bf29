#pragma once

#include <cstdint>
#include <vector>

#include "qdemux/detection.hpp"
#include "qdemux/event_stream.hpp"

namespace qdemux {

/// Start-stop-free coincidence histogram of delays (b - a). Bin k is centred
/// on k * bin_width and rounds half away from zero, so swapping a and b
/// mirrors the delay axis exactly.
struct CoincidenceHistogram {
  Picoseconds bin_width_ps = 0;
  Picoseconds span_ps = 0;
  std::vector<std::uint64_t> counts;  // index k + half_bins(), k in [-half, half]
  std::uint64_t total_pairs_examined = 0;

  CoincidenceHistogram() = default;
  CoincidenceHistogram(Picoseconds bin_width, Picoseconds span);

  long half_bins() const { return static_cast<long>(span_ps / bin_width_ps); }
  Picoseconds delay_of(std::size_t index) const;
  std::uint64_t at_bin(long k) const { return counts[static_cast<std::size_t>(k + half_bins())]; }
  std::uint64_t total() const;

  /// Partial histograms over disjoint data merge associatively.
  CoincidenceHistogram& operator+=(const CoincidenceHistogram& other);
  CoincidenceHistogram mirrored() const;

  friend bool operator==(const CoincidenceHistogram&, const CoincidenceHistogram&) = default;
};

/// Every (a, b) pair whose delay rounds into [-span, span], in one merge pass.
CoincidenceHistogram histogram(const EventStream& a, const EventStream& b, const CoincidenceConfig& cfg);

struct WindowCounts {
  std::uint64_t center = 0;
  std::uint64_t sidebands = 0;        // both side peaks together
  std::uint64_t background_raw = 0;   // counts in the far region
  double background_windows = 0.0;    // far-region width / window width

  /// Far background normalised to one window width.
  double far_background() const { return background_windows > 0.0 ? background_raw / background_windows : 0.0; }
};

/// Central window [-w/2, w/2], side windows at +/-side_delay and the far
/// region |delay| >= max(span/2, side_delay + w). Windows select bins by
/// centre. Throws DomainError when the window exceeds span/4 or would overlap
/// the side peaks.
WindowCounts central_window_counts(const CoincidenceHistogram& h, double window_ns, double side_delay_ns = 1.6);

}  // namespace qdemux
