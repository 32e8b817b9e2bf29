#include "qdemux/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <fmt/core.h>

#include "qdemux/errors.hpp"

namespace qdemux {

CoincidenceHistogram::CoincidenceHistogram(Picoseconds bin_width, Picoseconds span)
    : bin_width_ps(bin_width), span_ps(span) {
  if (bin_width <= 0 || span <= 0 || span % bin_width != 0) {
    throw DomainError("histogram span must be a positive multiple of the bin width");
  }
  counts.assign(static_cast<std::size_t>(2 * half_bins() + 1), 0);
}

Picoseconds CoincidenceHistogram::delay_of(std::size_t index) const {
  return (static_cast<long>(index) - half_bins()) * bin_width_ps;
}

std::uint64_t CoincidenceHistogram::total() const {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

CoincidenceHistogram& CoincidenceHistogram::operator+=(const CoincidenceHistogram& other) {
  if (other.bin_width_ps != bin_width_ps || other.span_ps != span_ps) {
    throw DomainError("cannot merge histograms with different binning");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  total_pairs_examined += other.total_pairs_examined;
  return *this;
}

CoincidenceHistogram CoincidenceHistogram::mirrored() const {
  CoincidenceHistogram m = *this;
  std::reverse(m.counts.begin(), m.counts.end());
  return m;
}

CoincidenceHistogram histogram(const EventStream& a, const EventStream& b, const CoincidenceConfig& cfg) {
  if (!a.is_sorted()) throw ValidationError(a.channel_label, "histogram input is not time-sorted");
  if (!b.is_sorted()) throw ValidationError(b.channel_label, "histogram input is not time-sorted");
  CoincidenceHistogram h(cfg.bin_ps(), cfg.span_ps());
  const Picoseconds bin = h.bin_width_ps;
  const long half = h.half_bins();
  // Reach half a bin past the span so the outermost bins are full width.
  const Picoseconds reach = h.span_ps + bin / 2;

  const auto& tb = b.timestamps_ps;
  std::size_t lo = 0;
  for (Picoseconds ta : a.timestamps_ps) {
    while (lo < tb.size() && tb[lo] < ta - reach) ++lo;
    for (std::size_t j = lo; j < tb.size() && tb[j] <= ta + reach; ++j) {
      const Picoseconds d = tb[j] - ta;
      // Round half away from zero: |d| / bin + 1/2, floored, with sign restored.
      const Picoseconds mag = (2 * std::llabs(d) + bin) / (2 * bin);
      const long k = static_cast<long>(d < 0 ? -mag : mag);
      if (k < -half || k > half) continue;
      ++h.counts[static_cast<std::size_t>(k + half)];
      ++h.total_pairs_examined;
    }
  }
  return h;
}

WindowCounts central_window_counts(const CoincidenceHistogram& h, double window_ns, double side_delay_ns) {
  const double w = window_ns * kPsPerNs;
  const double side = side_delay_ns * kPsPerNs;
  const double span = static_cast<double>(h.span_ps);
  if (!(w > 0.0) || w > span / 4.0) throw DomainError(fmt::format("window {} ns must be positive and <= span/4", window_ns));
  if (w > side) {
    throw DomainError(fmt::format("window {} ns overlaps the side peaks at +/-{} ns", window_ns, side_delay_ns));
  }
  const double far_start = std::max(span / 2.0, side + w);
  if (far_start >= span) throw DomainError("no far-background region left inside the histogram span");

  WindowCounts out;
  std::size_t center_bins = 0;
  std::size_t far_bins = 0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double d = static_cast<double>(h.delay_of(i));
    const double ad = std::abs(d);
    if (ad <= w / 2.0) {
      out.center += h.counts[i];
      ++center_bins;
    } else if (std::abs(ad - side) <= w / 2.0) {
      out.sidebands += h.counts[i];
    } else if (ad >= far_start) {
      out.background_raw += h.counts[i];
      ++far_bins;
    }
  }
  out.background_windows = center_bins > 0 ? static_cast<double>(far_bins) / static_cast<double>(center_bins) : 0.0;
  return out;
}

}  // namespace qdemux
