#include "qdemux/seeding.hpp"

#include <array>
#include <stdexcept>

#include <fmt/core.h>
#include <openssl/evp.h>

namespace qdemux {
namespace {

std::array<unsigned char, 32> sha256(std::string_view data) {
  std::array<unsigned char, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  std::string hex;
  hex.reserve(64);
  for (unsigned char byte : sha256(data)) hex += fmt::format("{:02x}", byte);
  return hex;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::string_view label) {
  const std::string key = fmt::format("{}\x1f{}\x1f{}", master, stage, label);
  const auto digest = sha256(key);
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) seed = (seed << 8) | digest[static_cast<std::size_t>(i)];
  return seed;
}

}  // namespace qdemux
