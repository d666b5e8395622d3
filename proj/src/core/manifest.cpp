// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/core/manifest.hpp"

#include "remcap/core/error.hpp"

namespace remcap {

std::uint64_t SessionManifest::delivered_frames() const noexcept {
  std::uint64_t n = 0;
  for (const auto& s : segments) n += s.frame_count;
  return n;
}

void SessionManifest::validate() const {
  if (fps < 1 || fps > 120) {
    throw Error(Errc::ManifestParseError, "fps: " + std::to_string(fps) + " outside 1..120");
  }
  for (std::size_t i = 1; i < segments.size(); ++i) {
    const auto& prev = segments[i - 1];
    // Indices strictly increase inside a segment, so its last index is at
    // least first + count - 1.
    if (segments[i].first_frame_index < prev.first_frame_index + prev.frame_count) {
      throw Error(Errc::ManifestParseError,
                  "segments: " + segments[i].file + " overlaps or precedes " + prev.file);
    }
  }
}

nlohmann::ordered_json to_json(const SessionManifest& m) {
  nlohmann::ordered_json segs = nlohmann::ordered_json::array();
  for (const auto& s : m.segments) {
    nlohmann::ordered_json e;
    e["file"] = s.file;
    e["first_frame_index"] = s.first_frame_index;
    e["frame_count"] = s.frame_count;
    e["crc32"] = s.crc32;
    segs.push_back(std::move(e));
  }
  nlohmann::ordered_json j;
  j["session_id"] = m.session_id.str();
  j["scene_id"] = m.scene_id;
  j["device_id"] = m.device_id;
  j["fps"] = m.fps;
  j["resolution"] = std::string(preset_name(m.resolution));
  j["start_ts_micros"] = m.start_ts_micros;
  j["frame_count"] = m.frame_count;
  j["segments"] = std::move(segs);
  j["deterministic_clock"] = m.deterministic_clock;
  return j;
}

SessionManifest manifest_from_json(const nlohmann::json& j) {
  try {
    SessionManifest m;
    auto id = Uuid::parse(j.at("session_id").get<std::string>());
    if (!id) throw Error(Errc::ManifestParseError, "session_id: not a UUID");
    m.session_id = *id;
    m.scene_id = j.at("scene_id").get<std::string>();
    m.device_id = j.at("device_id").get<std::uint16_t>();
    m.fps = j.at("fps").get<std::uint8_t>();
    auto preset = parse_preset(j.at("resolution").get<std::string>());
    if (!preset) throw Error(Errc::ManifestParseError, "resolution: unknown preset");
    m.resolution = *preset;
    m.start_ts_micros = j.at("start_ts_micros").get<std::uint64_t>();
    m.frame_count = j.at("frame_count").get<std::uint64_t>();
    for (const auto& s : j.at("segments")) {
      SegmentInfo info;
      info.file = s.at("file").get<std::string>();
      info.first_frame_index = s.at("first_frame_index").get<std::uint64_t>();
      info.frame_count = s.at("frame_count").get<std::uint64_t>();
      info.crc32 = s.at("crc32").get<std::uint32_t>();
      m.segments.push_back(std::move(info));
    }
    m.deterministic_clock = j.at("deterministic_clock").get<bool>();
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ManifestParseError, e.what());
  }
}

std::string manifest_text(const SessionManifest& manifest) {
  return to_json(manifest).dump(2) + "\n";
}

ContainerLayout ContainerLayout::for_session(const std::filesystem::path& data_root, const Uuid& id) {
  return {data_root / ("session-" + id.str())};
}

}  // namespace remcap
