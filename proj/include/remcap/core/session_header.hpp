// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "remcap/core/resolution.hpp"
#include "remcap/core/uuid.hpp"

namespace remcap {

// 64-byte preamble of an ingest connection:
//   "EXHS" | session_id(16) | device_id(2 LE) | fps(1) | preset code(1) | flags(1) | zeros(39)
inline constexpr std::size_t kSessionHeaderSize = 64;
inline constexpr std::uint8_t kFlagDeterministic = 0x01;

struct SessionHeader {
  Uuid session_id;
  std::uint16_t device_id = 0;
  std::uint8_t fps = 30;
  Preset resolution = Preset::P360;
  std::uint8_t flags = 0;

  bool deterministic() const noexcept { return (flags & kFlagDeterministic) != 0; }
  friend bool operator==(const SessionHeader&, const SessionHeader&) = default;
};

std::array<std::uint8_t, kSessionHeaderSize> encode_session_header(const SessionHeader& header);
/// Throws BadMagic / PayloadMismatch (unknown preset, fps 0, non-zero padding).
SessionHeader decode_session_header(const std::array<std::uint8_t, kSessionHeaderSize>& bytes);

}  // namespace remcap
