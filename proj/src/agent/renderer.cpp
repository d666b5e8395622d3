// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/agent/renderer.hpp"

#include <cmath>
#include <cstring>

namespace remcap::agent {

namespace {

double positive_frac(double a) { return a - std::floor(a); }

}  // namespace

MarkerOrigin marker_origin(double x, double y, Dimensions dims) noexcept {
  const double fu = positive_frac(x / 10.0) * (dims.width - 33);
  const double fv = positive_frac(y / 10.0) * (dims.height - 33);
  return {static_cast<int>(std::floor(fu)), static_cast<int>(std::floor(fv))};
}

std::uint64_t deterministic_timestamp(std::uint64_t start_micros, std::uint64_t frame_index,
                                      std::uint8_t fps) noexcept {
  const auto whole = frame_index / fps;
  const auto rem = frame_index % fps;
  return start_micros + whole * 1'000'000ull + rem * 1'000'000ull / fps;
}

std::size_t raw_frame_size(Preset preset) noexcept {
  return kFrameHeaderSize + dimensions(preset).pixel_bytes();
}

FrameRecord render_frame(const PoseState& state, std::uint64_t frame_index, Preset preset,
                         const FrameStamp& stamp, FrameEncoding encoding) {
  const auto dims = dimensions(preset);
  FrameRecord f;
  f.session_id = stamp.session_id;
  f.device_id = stamp.device_id;
  f.frame_index = frame_index;
  f.capture_ts_micros = stamp.capture_ts_micros;
  f.width = dims.width;
  f.height = dims.height;
  f.encoding = FrameEncoding::RawRgb24;

  Bytes px(dims.pixel_bytes(), kBackground);
  const std::size_t stride = static_cast<std::size_t>(dims.width) * 3;

  const auto m = marker_origin(state.x, state.y, dims);
  for (int r = 0; r < kMarkerSize; ++r) {
    auto* row = px.data() + static_cast<std::size_t>(m.v + r) * stride +
                static_cast<std::size_t>(m.u) * 3;
    std::memset(row, 255, kMarkerSize * 3);
  }

  for (int bit = 0; bit < 64; ++bit) {
    const std::uint8_t v = ((frame_index >> bit) & 1u) ? 255 : 0;
    std::memset(px.data() + bit * 3, v, 3);
  }

  if (encoding == FrameEncoding::RleRgb24) {
    f.encoding = FrameEncoding::RleRgb24;
    f.payload = rle_encode(px);
  } else {
    f.payload = std::move(px);
  }
  return f;
}

}  // namespace remcap::agent
