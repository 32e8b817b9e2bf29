#pragma once

// ITU 100-GHz C-band grid: channel n sits at 190 + n/10 THz. Signal/idler
// pairs from the ring are symmetric about the pump channel.

#include <span>
#include <string>
#include <vector>

namespace qdemux {

inline constexpr int kMinChannel = 15;
inline constexpr int kMaxChannel = 62;

double channel_frequency_thz(int index);
/// Vacuum wavelength of a grid channel in nm. Throws DomainError outside [15, 62].
double channel_wavelength_nm(int index);

double frequency_to_wavelength_nm(double frequency_thz);
double wavelength_to_frequency_thz(double wavelength_nm);

struct ItuChannel {
  int index = 34;

  static ItuChannel from_index(int index);

  double center_frequency_thz() const { return channel_frequency_thz(index); }
  double center_wavelength_nm() const { return channel_wavelength_nm(index); }
  std::string name() const { return "C" + std::to_string(index); }

  friend bool operator==(const ItuChannel&, const ItuChannel&) = default;
};

/// Idler channel correlated with `signal_index` for a pump in `pump_index`:
/// 2*pump - signal.
int paired_channel(int signal_index, int pump_index);

struct ChannelPair {
  ItuChannel signal;
  ItuChannel idler;
  ItuChannel pump;
  int ordinal = 1;  // 1-based position in the plan

  std::string signal_label() const { return "S" + std::to_string(ordinal); }
  std::string idler_label() const { return "I" + std::to_string(ordinal); }
  // Up-converted signal photons, written S'n.
  std::string converted_label() const { return "S'" + std::to_string(ordinal); }
  std::string label() const { return signal_label() + "-" + idler_label(); }

  friend bool operator==(const ChannelPair&, const ChannelPair&) = default;
};

/// Pairs for each grid offset from the pump, labelled S1/I1.. in order of
/// increasing offset. Signal takes the long-wavelength (lower index) side.
std::vector<ChannelPair> build_plan(int pump_index, std::span<const int> pair_offsets);

}  // namespace qdemux
