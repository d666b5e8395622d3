// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/inference/detector.hpp"

#include <algorithm>

#include "remcap/core/error.hpp"

namespace remcap::inference {
namespace {

constexpr int kMarkerSide = 32;

bool white(ByteView rgb, int width, int row, int col) {
  const std::size_t off = (static_cast<std::size_t>(row) * width + col) * 3;
  return rgb[off] == 255 && rgb[off + 1] == 255 && rgb[off + 2] == 255;
}

bool block_is_white(ByteView rgb, int width, int top, int left, int rows) {
  for (int r = top; r < top + rows; ++r)
    for (int c = left; c < left + kMarkerSide; ++c)
      if (!white(rgb, width, r, c)) return false;
  return true;
}

void set_red(Bytes& rgb, int width, int row, int col) {
  const std::size_t off = (static_cast<std::size_t>(row) * width + col) * 3;
  rgb[off] = 255;
  rgb[off + 1] = 0;
  rgb[off + 2] = 0;
}

void check_box(const Detection& d, int width, int height) {
  if (d.w <= 0 || d.h <= 0 || d.x < 0 || d.y < 0 || d.x + d.w > width || d.y + d.h > height)
    throw Error(Errc::BoxOutOfBounds, "box (" + std::to_string(d.x) + "," + std::to_string(d.y) +
                                          "," + std::to_string(d.w) + "," + std::to_string(d.h) +
                                          ") outside " + std::to_string(width) + "x" +
                                          std::to_string(height));
}

}  // namespace

nlohmann::json to_json(const Detection& d) {
  return {{"x", d.x}, {"y", d.y}, {"w", d.w}, {"h", d.h}, {"label", d.label}, {"score", d.score}};
}

Detection detection_from_json(const nlohmann::json& j) {
  try {
    return Detection{j.at("x").get<int>(),           j.at("y").get<int>(),
                     j.at("w").get<int>(),           j.at("h").get<int>(),
                     j.at("label").get<std::string>(), j.at("score").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedPayload, std::string("detection: ") + e.what());
  }
}

std::vector<Detection> detect_marker(ByteView rgb, int width, int height) {
  if (width <= 0 || height <= 0 ||
      rgb.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3)
    throw Error(Errc::PayloadMismatch, "pixel buffer does not match dimensions");
  if (width < kMarkerSide || height < kMarkerSide) return {};
  for (int r = 1; r < height; ++r) {
    for (int c = 0; c + kMarkerSide <= width; ++c) {
      if (!white(rgb, width, r, c)) continue;
      if (c > 0 && white(rgb, width, r, c - 1)) continue;  // not a left edge
      if (r > 1 && white(rgb, width, r - 1, c)) continue;  // not a top edge
      if (c + kMarkerSide < width && white(rgb, width, r, c + kMarkerSide)) continue;
      // A block whose top row is 0 shows only its lower 31 rows.
      const bool clipped = r == 1 && !(height >= 1 + kMarkerSide && block_is_white(rgb, width, 1, c, kMarkerSide));
      const int rows = clipped ? kMarkerSide - 1 : kMarkerSide;
      if (r + rows > height || !block_is_white(rgb, width, r, c, rows)) continue;
      if (r + rows < height && white(rgb, width, r + rows, c)) continue;
      return {Detection{c, clipped ? 0 : r, kMarkerSide, kMarkerSide, "marker", 1.0}};
    }
  }
  return {};
}

std::vector<Detection> detect_marker(const FrameRecord& frame) {
  const Bytes px = frame.pixels();
  return detect_marker(px, frame.width, frame.height);
}

void annotate_pixels(Bytes& rgb, int width, int height, std::span<const Detection> detections) {
  for (const auto& d : detections) check_box(d, width, height);
  auto plot = [&](int row, int col) {
    if (row >= 1 && row < height && col >= 0 && col < width) set_red(rgb, width, row, col);
  };
  for (const auto& d : detections) {
    const int top = d.y - 1, bottom = d.y + d.h, left = d.x - 1, right = d.x + d.w;
    for (int c = left; c <= right; ++c) {
      plot(top, c);
      plot(bottom, c);
    }
    for (int r = d.y; r < bottom; ++r) {
      plot(r, left);
      plot(r, right);
    }
  }
}

FrameRecord annotate(const FrameRecord& frame, std::span<const Detection> detections) {
  for (const auto& d : detections) check_box(d, frame.width, frame.height);
  if (detections.empty()) return frame;
  FrameRecord out = frame;
  Bytes px = frame.pixels();
  annotate_pixels(px, frame.width, frame.height, detections);
  out.payload = frame.encoding == FrameEncoding::RleRgb24 ? rle_encode(px) : std::move(px);
  return out;
}

}  // namespace remcap::inference
