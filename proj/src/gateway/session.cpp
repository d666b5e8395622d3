// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/gateway/session.hpp"

namespace remcap::gateway {

std::string_view session_status_name(SessionStatus s) noexcept {
  switch (s) {
    case SessionStatus::Starting: return "STARTING";
    case SessionStatus::Live: return "LIVE";
    case SessionStatus::Stopping: return "STOPPING";
    case SessionStatus::Packed: return "PACKED";
  }
  return "UNKNOWN";
}

bool can_transition(SessionStatus from, SessionStatus to) noexcept {
  return static_cast<int>(to) > static_cast<int>(from);
}

nlohmann::json to_json(const SessionState& s) {
  nlohmann::json j{{"session_id", s.session_id.str()},
                   {"scene_id", s.scene_id},
                   {"device_id", s.device_id},
                   {"status", session_status_name(s.status)}};
  j["manifest"] = s.manifest ? nlohmann::json(to_json(*s.manifest)) : nlohmann::json(nullptr);
  return j;
}

}  // namespace remcap::gateway
