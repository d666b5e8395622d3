// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace remcap::gateway {

struct DeviceSpec {
  std::uint16_t device_id = 0;
  std::string capabilities;
  friend bool operator==(const DeviceSpec&, const DeviceSpec&) = default;
};

struct SceneConfig {
  std::string scene_id;
  std::vector<DeviceSpec> devices;
  std::string description;

  bool has_device(std::uint16_t device_id) const noexcept;
  friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

nlohmann::json to_json(const SceneConfig& scene);
/// Throws InvalidArgument on missing fields or duplicate device ids.
SceneConfig scene_from_json(const nlohmann::json& j);

class SceneRegistry {
 public:
  SceneRegistry() = default;
  /// Throws InvalidArgument on duplicate scene ids.
  explicit SceneRegistry(std::vector<SceneConfig> scenes);

  /// Accepts either {"scenes": [...]} or a bare array.
  static SceneRegistry from_json(const nlohmann::json& j);
  static SceneRegistry load(const std::filesystem::path& path);

  /// Throws UnknownScene.
  const SceneConfig& at(const std::string& scene_id) const;
  bool contains(const std::string& scene_id) const { return scenes_.count(scene_id) != 0; }
  std::vector<SceneConfig> all() const;

 private:
  std::map<std::string, SceneConfig> scenes_;
};

}  // namespace remcap::gateway
