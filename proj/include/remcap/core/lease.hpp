// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace remcap {

struct SceneLease {
  std::string scene_id;
  std::string holder;
  std::uint64_t acquired_ts_micros = 0;
  std::uint32_t ttl_seconds = 0;

  std::uint64_t expires_at_micros() const noexcept {
    return acquired_ts_micros + static_cast<std::uint64_t>(ttl_seconds) * 1'000'000ull;
  }
  bool expired_at(std::uint64_t now_micros) const noexcept {
    return now_micros >= expires_at_micros();
  }

  friend bool operator==(const SceneLease&, const SceneLease&) = default;
};

nlohmann::json to_json(const SceneLease& lease);
SceneLease lease_from_json(const nlohmann::json& j);

}  // namespace remcap
