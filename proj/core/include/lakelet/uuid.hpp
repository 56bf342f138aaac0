#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace lakelet {

/// 128-bit record identity, rendered 8-4-4-4-12 lower-case hex.
class Uuid {
 public:
  Uuid() = default;
  explicit Uuid(const std::array<uint8_t, 16>& bytes) : bytes_(bytes) {}

  /// Deterministic id derived from a name (SHA-256 truncated, version nibble 8).
  static Uuid from_name(std::string_view name);
  static Uuid random();
  static std::optional<Uuid> parse(std::string_view text);

  std::string to_string() const;
  const std::array<uint8_t, 16>& bytes() const { return bytes_; }
  bool is_nil() const;

  auto operator<=>(const Uuid&) const = default;

 private:
  std::array<uint8_t, 16> bytes_{};
};

}  // namespace lakelet

template <>
struct std::hash<lakelet::Uuid> {
  size_t operator()(const lakelet::Uuid& u) const noexcept {
    uint64_t h = 0;
    for (int i = 0; i < 8; ++i) h = (h << 8) | u.bytes()[i];
    return static_cast<size_t>(h ^ (static_cast<uint64_t>(u.bytes()[15]) << 3));
  }
};
