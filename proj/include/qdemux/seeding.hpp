#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace qdemux {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Independent sub-seed for one stochastic stage. Adding a new stage never
/// perturbs the seeds of existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::string_view label);

}  // namespace qdemux
