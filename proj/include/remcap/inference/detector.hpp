// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "remcap/core/frame.hpp"

namespace remcap::inference {

struct Detection {
  int x = 0;  // top-left column
  int y = 0;  // top-left row
  int w = 0;
  int h = 0;
  std::string label;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

nlohmann::json to_json(const Detection& d);
Detection detection_from_json(const nlohmann::json& j);

/// Stand-in detector: finds the 32x32 pure-white block drawn by the synthetic
/// renderer. Row 0 (the index strip) is never inspected; a block whose top row
/// would be row 0 is recognised from its 31 visible rows.
std::vector<Detection> detect_marker(const FrameRecord& frame);
std::vector<Detection> detect_marker(ByteView rgb, int width, int height);

/// Draws a 1-pixel red outline just outside each box, clipped to the frame and
/// to rows >= 1 so the index strip survives. Throws BoxOutOfBounds.
FrameRecord annotate(const FrameRecord& frame, std::span<const Detection> detections);
void annotate_pixels(Bytes& rgb, int width, int height, std::span<const Detection> detections);

}  // namespace remcap::inference
