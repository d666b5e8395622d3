// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "remcap/core/manifest.hpp"
#include "remcap/core/uuid.hpp"

namespace remcap::gateway {

enum class SessionStatus : std::uint8_t { Starting, Live, Stopping, Packed };

std::string_view session_status_name(SessionStatus s) noexcept;
/// True iff `to` is strictly later than `from` in the lifecycle.
bool can_transition(SessionStatus from, SessionStatus to) noexcept;

struct SessionState {
  Uuid session_id;
  std::string scene_id;
  std::uint16_t device_id = 0;
  SessionStatus status = SessionStatus::Starting;
  std::optional<SessionManifest> manifest;  // present iff Packed
};

nlohmann::json to_json(const SessionState& s);

/// Forward-only status holder. advance() refuses backward or equal moves.
class StatusMachine {
 public:
  SessionStatus status() const noexcept { return status_; }
  bool advance(SessionStatus to) noexcept {
    if (!can_transition(status_, to)) return false;
    status_ = to;
    return true;
  }

 private:
  SessionStatus status_ = SessionStatus::Starting;
};

}  // namespace remcap::gateway
