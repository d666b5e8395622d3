// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "remcap/core/resolution.hpp"
#include "remcap/core/segment.hpp"
#include "remcap/core/uuid.hpp"

namespace remcap {

struct SessionManifest {
  Uuid session_id;
  std::string scene_id;
  std::uint16_t device_id = 0;
  std::uint8_t fps = 30;
  Preset resolution = Preset::P360;
  std::uint64_t start_ts_micros = 0;
  std::uint64_t frame_count = 0;
  std::vector<SegmentInfo> segments;
  bool deterministic_clock = false;

  std::uint64_t delivered_frames() const noexcept;
  /// Checks ordering/disjointness of segments and the fps range.
  void validate() const;

  friend bool operator==(const SessionManifest&, const SessionManifest&) = default;
};

/// JSON with keys in declaration order.
nlohmann::ordered_json to_json(const SessionManifest& manifest);
/// Throws ManifestParseError.
SessionManifest manifest_from_json(const nlohmann::json& j);
std::string manifest_text(const SessionManifest& manifest);

/// Layout of a packed session under a data root.
struct ContainerLayout {
  std::filesystem::path root;

  static ContainerLayout for_session(const std::filesystem::path& data_root, const Uuid& id);

  std::filesystem::path manifest() const { return root / "manifest.json"; }
  std::filesystem::path srt() const { return root / "session.srt"; }
  std::filesystem::path segments_dir() const { return root / "segments"; }
  std::filesystem::path segment(const std::string& file) const { return segments_dir() / file; }
};

}  // namespace remcap
