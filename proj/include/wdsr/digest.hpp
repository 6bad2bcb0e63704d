#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace wdsr {

/// Incremental FNV-1a (64 bit). Used to tag reports with the inputs they
/// were computed from; not a cryptographic hash.
class Digest {
 public:
  Digest& update(std::string_view bytes);
  Digest& update(double value);
  Digest& update(std::uint64_t value);

  [[nodiscard]] std::uint64_t value() const { return state_; }
  /// 16 lowercase hex digits.
  [[nodiscard]] std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace wdsr
