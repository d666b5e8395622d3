// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/gateway/scene.hpp"

#include <set>

#include "remcap/core/error.hpp"
#include "remcap/core/segment.hpp"

namespace remcap::gateway {

using nlohmann::json;

bool SceneConfig::has_device(std::uint16_t device_id) const noexcept {
  for (const auto& d : devices)
    if (d.device_id == device_id) return true;
  return false;
}

json to_json(const SceneConfig& scene) {
  json devices = json::array();
  for (const auto& d : scene.devices)
    devices.push_back({{"device_id", d.device_id}, {"capabilities", d.capabilities}});
  return {{"scene_id", scene.scene_id}, {"description", scene.description}, {"devices", devices}};
}

SceneConfig scene_from_json(const json& j) {
  SceneConfig s;
  try {
    s.scene_id = j.at("scene_id").get<std::string>();
    s.description = j.value("description", "");
    std::set<std::uint16_t> seen;
    for (const auto& d : j.at("devices")) {
      DeviceSpec spec{d.at("device_id").get<std::uint16_t>(), d.value("capabilities", "")};
      if (!seen.insert(spec.device_id).second) {
        throw Error(Errc::InvalidArgument, "scene " + s.scene_id + ": duplicate device_id " +
                                               std::to_string(spec.device_id));
      }
      s.devices.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("scene config: ") + e.what());
  }
  if (s.scene_id.empty()) throw Error(Errc::InvalidArgument, "scene config: empty scene_id");
  return s;
}

SceneRegistry::SceneRegistry(std::vector<SceneConfig> scenes) {
  for (auto& s : scenes) {
    const auto id = s.scene_id;
    if (!scenes_.emplace(id, std::move(s)).second)
      throw Error(Errc::InvalidArgument, "duplicate scene_id " + id);
  }
}

SceneRegistry SceneRegistry::from_json(const json& j) {
  const json& arr = j.is_object() ? j.at("scenes") : j;
  std::vector<SceneConfig> scenes;
  for (const auto& s : arr) scenes.push_back(scene_from_json(s));
  return SceneRegistry(std::move(scenes));
}

SceneRegistry SceneRegistry::load(const std::filesystem::path& path) {
  auto j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::InvalidArgument, path.string() + ": not JSON");
  return from_json(j);
}

const SceneConfig& SceneRegistry::at(const std::string& scene_id) const {
  auto it = scenes_.find(scene_id);
  if (it == scenes_.end()) throw Error(Errc::UnknownScene, "scene " + scene_id);
  return it->second;
}

std::vector<SceneConfig> SceneRegistry::all() const {
  std::vector<SceneConfig> out;
  for (const auto& [_, s] : scenes_) out.push_back(s);
  return out;
}

}  // namespace remcap::gateway
