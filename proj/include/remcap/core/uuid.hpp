// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace remcap {

/// 16-byte session identifier, printed in the canonical 8-4-4-4-12 form.
class Uuid {
 public:
  using Bytes = std::array<std::uint8_t, 16>;

  constexpr Uuid() = default;
  constexpr explicit Uuid(const Bytes& bytes) : bytes_(bytes) {}

  static Uuid random();
  static std::optional<Uuid> parse(std::string_view text);

  const Bytes& bytes() const noexcept { return bytes_; }
  bool is_nil() const noexcept;
  std::string str() const;

  friend auto operator<=>(const Uuid&, const Uuid&) = default;

 private:
  Bytes bytes_{};
};

}  // namespace remcap

template <>
struct std::hash<remcap::Uuid> {
  std::size_t operator()(const remcap::Uuid& id) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto b : id.bytes()) {
      h = (h ^ b) * 1099511628211ull;
    }
    return h;
  }
};
