// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/core/session_header.hpp"

#include <cstring>

#include "remcap/core/bytes.hpp"
#include "remcap/core/error.hpp"

namespace remcap {

namespace {
constexpr std::uint8_t kMagic[4] = {'E', 'X', 'H', 'S'};
constexpr std::size_t kOffSession = 4;
constexpr std::size_t kOffDevice = 20;
constexpr std::size_t kOffFps = 22;
constexpr std::size_t kOffPreset = 23;
constexpr std::size_t kOffFlags = 24;
constexpr std::size_t kOffPadding = 25;
}  // namespace

std::array<std::uint8_t, kSessionHeaderSize> encode_session_header(const SessionHeader& h) {
  std::array<std::uint8_t, kSessionHeaderSize> out{};
  std::memcpy(out.data(), kMagic, 4);
  std::memcpy(out.data() + kOffSession, h.session_id.bytes().data(), 16);
  le::store(out.data() + kOffDevice, h.device_id);
  out[kOffFps] = h.fps;
  out[kOffPreset] = static_cast<std::uint8_t>(h.resolution);
  out[kOffFlags] = h.flags;
  return out;
}

SessionHeader decode_session_header(const std::array<std::uint8_t, kSessionHeaderSize>& b) {
  if (std::memcmp(b.data(), kMagic, 4) != 0) {
    throw Error(Errc::BadMagic, "session header magic: expected \"EXHS\"");
  }
  SessionHeader h;
  Uuid::Bytes id;
  std::memcpy(id.data(), b.data() + kOffSession, 16);
  h.session_id = Uuid(id);
  h.device_id = le::load<std::uint16_t>(b.data() + kOffDevice);
  h.fps = b[kOffFps];
  if (h.fps < 1 || h.fps > 120) {
    throw Error(Errc::PayloadMismatch, "fps: " + std::to_string(h.fps) + " outside 1..120");
  }
  auto preset = preset_from_code(b[kOffPreset]);
  if (!preset) throw Error(Errc::PayloadMismatch, "resolution: unknown preset code");
  h.resolution = *preset;
  h.flags = b[kOffFlags];
  for (std::size_t i = kOffPadding; i < b.size(); ++i) {
    if (b[i] != 0) throw Error(Errc::PayloadMismatch, "padding: non-zero byte at " + std::to_string(i));
  }
  return h;
}

}  // namespace remcap
