// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "remcap/agent/kinematics.hpp"
#include "remcap/core/frame.hpp"

namespace remcap::agent {

inline constexpr int kMarkerSize = 32;
inline constexpr std::uint8_t kBackground = 128;

struct MarkerOrigin {
  int u;  // column of the top-left pixel
  int v;  // row of the top-left pixel
  friend bool operator==(const MarkerOrigin&, const MarkerOrigin&) = default;
};

/// u = floor(frac(x/10) * (width - 33)), v likewise with y and height; frac is
/// the non-negative fractional part.
MarkerOrigin marker_origin(double x, double y, Dimensions dims) noexcept;

struct FrameStamp {
  Uuid session_id;
  std::uint16_t device_id = 0;
  std::uint64_t capture_ts_micros = 0;
};

/// Deterministic synthetic camera image: gray background, a 32x32 white marker
/// placed from the pose, and the frame index written into row 0, pixels 0..63
/// (white for 1 bits, black for 0 bits). The strip is drawn last.
FrameRecord render_frame(const PoseState& state, std::uint64_t frame_index, Preset preset,
                         const FrameStamp& stamp = {},
                         FrameEncoding encoding = FrameEncoding::RawRgb24);

/// start + frame_index * 1e6 / fps, floored.
std::uint64_t deterministic_timestamp(std::uint64_t start_micros, std::uint64_t frame_index,
                                      std::uint8_t fps) noexcept;

/// Bytes of one encoded RAW frame at the preset (header included).
std::size_t raw_frame_size(Preset preset) noexcept;

}  // namespace remcap::agent
