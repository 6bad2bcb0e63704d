#include "wdsr/digest.hpp"

#include <bit>

#include <fmt/core.h>

namespace wdsr {

Digest& Digest::update(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001b3ULL;
  }
  // Length separator so ("ab","c") and ("a","bc") differ.
  return update(static_cast<std::uint64_t>(bytes.size()));
}

Digest& Digest::update(double value) {
  return update(std::bit_cast<std::uint64_t>(value));
}

Digest& Digest::update(std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    state_ ^= (value >> (8 * i)) & 0xffU;
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

std::string Digest::hex() const { return fmt::format("{:016x}", state_); }

}  // namespace wdsr
