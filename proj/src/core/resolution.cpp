// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/core/resolution.hpp"

#include <array>

namespace remcap {

namespace {
constexpr std::array<Preset, 3> kPresets{Preset::P360, Preset::P720, Preset::P1080};
}

Dimensions dimensions(Preset preset) noexcept {
  switch (preset) {
    case Preset::P360: return {640, 360};
    case Preset::P720: return {1280, 720};
    case Preset::P1080: return {1920, 1080};
  }
  return {0, 0};
}

std::string_view preset_name(Preset preset) noexcept {
  switch (preset) {
    case Preset::P360: return "360p";
    case Preset::P720: return "720p";
    case Preset::P1080: return "1080p";
  }
  return "?";
}

std::optional<Preset> parse_preset(std::string_view name) noexcept {
  for (auto p : kPresets) {
    if (preset_name(p) == name) return p;
  }
  return std::nullopt;
}

std::optional<Preset> preset_for(std::uint16_t width, std::uint16_t height) noexcept {
  for (auto p : kPresets) {
    auto d = dimensions(p);
    if (d.width == width && d.height == height) return p;
  }
  return std::nullopt;
}

std::optional<Preset> preset_from_code(std::uint8_t code) noexcept {
  if (code < kPresets.size()) return kPresets[code];
  return std::nullopt;
}

std::span<const Preset> all_presets() noexcept { return kPresets; }

}  // namespace remcap
