#pragma once

#include <cstdint>
#include <numbers>

namespace qdemux {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// All event times are integer picoseconds.
using Picoseconds = std::int64_t;

inline constexpr double kPsPerSecond = 1e12;
inline constexpr double kPsPerNs = 1e3;

}  // namespace qdemux
