#pragma once

// Timestamped detection events and their CSV + JSON-manifest file format.
//
// CSV:      header `channel,time_ps`, one event per row, ascending per channel.
// Manifest: <stem>.manifest.json next to the CSV, holding
//           {duration_s, seed, config_digest, labels, seeds[, phase_rad]}.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdemux/constants.hpp"

namespace qdemux {

struct EventStream {
  std::string channel_label;
  std::vector<Picoseconds> timestamps_ps;
  double duration_s = 0.0;
  std::uint64_t seed = 0;

  Picoseconds duration_ps() const;
  bool is_sorted() const;              // non-decreasing
  bool is_strictly_increasing() const;
  /// Throws ValidationError unless timestamps are strictly increasing and
  /// inside [0, duration].
  void validate() const;

  friend bool operator==(const EventStream&, const EventStream&) = default;
};

struct StreamManifest {
  double duration_s = 0.0;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<std::string> labels;
  std::vector<std::uint64_t> seeds;   // per label
  std::optional<double> phase_rad;    // fringe point, when the run belongs to a scan
};

struct StreamFile {
  std::vector<EventStream> streams;
  StreamManifest manifest;
};

std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path);

/// Writes `csv_path` and its sidecar manifest.
void write_streams(std::span<const EventStream> streams, const std::filesystem::path& csv_path,
                   const std::string& config_digest, std::optional<double> phase_rad = std::nullopt);

/// Throws ParseError (with line number) on malformed rows and
/// ValidationError on non-monotone timestamps.
StreamFile read_streams(const std::filesystem::path& csv_path);

}  // namespace qdemux
