// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace remcap {

enum class CommandKind : std::uint8_t { SetSpeed, SetSteering, SetCamPan, SetCamTilt, Stop };

std::string_view command_kind_name(CommandKind kind) noexcept;
std::optional<CommandKind> parse_command_kind(std::string_view name) noexcept;

/// Inclusive argument range for a command kind (percent or degrees).
struct CommandRange {
  double min;
  double max;
};
CommandRange command_range(CommandKind kind) noexcept;

struct ControlCommand {
  std::uint64_t client_seq = 0;
  CommandKind kind = CommandKind::Stop;
  double value = 0.0;  // ignored for Stop
  std::uint64_t issued_ts_micros = 0;

  bool in_range() const noexcept;
  /// Same command with `value` clamped into its range (Stop gets 0).
  ControlCommand clamped() const noexcept;

  friend bool operator==(const ControlCommand&, const ControlCommand&) = default;
};

struct AppliedCommand {
  ControlCommand command;
  std::uint64_t applied_frame_index = 0;

  friend bool operator==(const AppliedCommand&, const AppliedCommand&) = default;
};

/// Canonical event payload: {"kind":"SET_SPEED","value":50}; Stop has no value.
/// Integral values are written as integers so logs and subtitles stay stable.
nlohmann::json command_payload(const ControlCommand& cmd);
/// Inverse of command_payload; throws MalformedPayload.
ControlCommand command_from_payload(const nlohmann::json& payload);

nlohmann::json to_json(const AppliedCommand& applied);
AppliedCommand applied_from_json(const nlohmann::json& j);

/// Number → JSON, preferring an integer when the value is integral.
nlohmann::json json_number(double value);

}  // namespace remcap
