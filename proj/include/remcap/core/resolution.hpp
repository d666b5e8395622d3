// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace remcap {

// Wire codes are stable: they appear in the EXHS session header.
enum class Preset : std::uint8_t { P360 = 0, P720 = 1, P1080 = 2 };

struct Dimensions {
  std::uint16_t width;
  std::uint16_t height;

  std::size_t pixel_bytes() const noexcept {
    return static_cast<std::size_t>(width) * height * 3;
  }
  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

Dimensions dimensions(Preset preset) noexcept;
std::string_view preset_name(Preset preset) noexcept;
std::optional<Preset> parse_preset(std::string_view name) noexcept;
std::optional<Preset> preset_for(std::uint16_t width, std::uint16_t height) noexcept;
std::optional<Preset> preset_from_code(std::uint8_t code) noexcept;
std::span<const Preset> all_presets() noexcept;

}  // namespace remcap
