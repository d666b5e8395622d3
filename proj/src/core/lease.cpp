// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/core/lease.hpp"

#include "remcap/core/error.hpp"

namespace remcap {

nlohmann::json to_json(const SceneLease& lease) {
  return {{"scene_id", lease.scene_id},
          {"holder", lease.holder},
          {"acquired_ts_micros", lease.acquired_ts_micros},
          {"ttl_seconds", lease.ttl_seconds},
          {"expires_at_micros", lease.expires_at_micros()}};
}

SceneLease lease_from_json(const nlohmann::json& j) {
  try {
    SceneLease l;
    l.scene_id = j.at("scene_id").get<std::string>();
    l.holder = j.at("holder").get<std::string>();
    l.acquired_ts_micros = j.at("acquired_ts_micros").get<std::uint64_t>();
    l.ttl_seconds = j.at("ttl_seconds").get<std::uint32_t>();
    return l;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedPayload, std::string("lease: ") + e.what());
  }
}

}  // namespace remcap
