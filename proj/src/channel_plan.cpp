#include "qdemux/channel_plan.hpp"

#include <algorithm>

#include <fmt/core.h>

#include "qdemux/constants.hpp"
#include "qdemux/errors.hpp"

namespace qdemux {
namespace {

void require_in_band(int index, const char* what) {
  if (index < kMinChannel || index > kMaxChannel) {
    throw DomainError(fmt::format("{} channel C{} outside supported C-band range [C{}, C{}]", what,
                                  index, kMinChannel, kMaxChannel));
  }
}

}  // namespace

double channel_frequency_thz(int index) {
  require_in_band(index, "ITU");
  return (1900.0 + index) / 10.0;
}

double channel_wavelength_nm(int index) { return frequency_to_wavelength_nm(channel_frequency_thz(index)); }

double frequency_to_wavelength_nm(double frequency_thz) {
  if (!(frequency_thz > 0.0)) throw DomainError("frequency must be positive");
  return kSpeedOfLight / (frequency_thz * 1e12) * 1e9;
}

double wavelength_to_frequency_thz(double wavelength_nm) {
  if (!(wavelength_nm > 0.0)) throw DomainError("wavelength must be positive");
  return kSpeedOfLight / (wavelength_nm * 1e-9) / 1e12;
}

ItuChannel ItuChannel::from_index(int index) {
  require_in_band(index, "ITU");
  return ItuChannel{index};
}

int paired_channel(int signal_index, int pump_index) {
  require_in_band(pump_index, "pump");
  require_in_band(signal_index, "signal");
  const int idler = 2 * pump_index - signal_index;
  require_in_band(idler, "paired");
  return idler;
}

std::vector<ChannelPair> build_plan(int pump_index, std::span<const int> pair_offsets) {
  require_in_band(pump_index, "pump");
  std::vector<int> offsets(pair_offsets.begin(), pair_offsets.end());
  std::sort(offsets.begin(), offsets.end());
  if (std::adjacent_find(offsets.begin(), offsets.end()) != offsets.end()) {
    throw ValidationError("pair_offsets", "duplicate channel offset");
  }

  std::vector<ChannelPair> plan;
  plan.reserve(offsets.size());
  int ordinal = 1;
  for (int offset : offsets) {
    if (offset <= 0) throw ValidationError("pair_offsets", fmt::format("offset {} must be positive", offset));
    const int signal = pump_index - offset;
    const int idler = paired_channel(signal, pump_index);
    plan.push_back(ChannelPair{ItuChannel::from_index(signal), ItuChannel::from_index(idler),
                               ItuChannel::from_index(pump_index), ordinal++});
  }
  return plan;
}

}  // namespace qdemux
