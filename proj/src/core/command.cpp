// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/core/command.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "remcap/core/error.hpp"

namespace remcap {

namespace {
constexpr std::array<CommandKind, 5> kKinds{CommandKind::SetSpeed, CommandKind::SetSteering,
                                            CommandKind::SetCamPan, CommandKind::SetCamTilt,
                                            CommandKind::Stop};
}

std::string_view command_kind_name(CommandKind kind) noexcept {
  switch (kind) {
    case CommandKind::SetSpeed: return "SET_SPEED";
    case CommandKind::SetSteering: return "SET_STEERING";
    case CommandKind::SetCamPan: return "SET_CAM_PAN";
    case CommandKind::SetCamTilt: return "SET_CAM_TILT";
    case CommandKind::Stop: return "STOP";
  }
  return "?";
}

std::optional<CommandKind> parse_command_kind(std::string_view name) noexcept {
  for (auto k : kKinds) {
    if (command_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

CommandRange command_range(CommandKind kind) noexcept {
  switch (kind) {
    case CommandKind::SetSpeed: return {-100.0, 100.0};
    case CommandKind::SetSteering: return {-30.0, 30.0};
    case CommandKind::SetCamPan: return {-90.0, 90.0};
    case CommandKind::SetCamTilt: return {-35.0, 65.0};
    case CommandKind::Stop: return {0.0, 0.0};
  }
  return {0.0, 0.0};
}

bool ControlCommand::in_range() const noexcept {
  if (kind == CommandKind::Stop) return true;
  auto r = command_range(kind);
  return std::isfinite(value) && value >= r.min && value <= r.max;
}

ControlCommand ControlCommand::clamped() const noexcept {
  ControlCommand c = *this;
  auto r = command_range(kind);
  if (kind == CommandKind::Stop || std::isnan(value)) {
    c.value = 0.0;
  } else {
    c.value = std::clamp(value, r.min, r.max);
  }
  return c;
}

nlohmann::json json_number(double value) {
  double ip = 0.0;
  if (std::isfinite(value) && std::modf(value, &ip) == 0.0 &&
      std::fabs(value) < 9.0e15) {
    return static_cast<std::int64_t>(value);
  }
  return value;
}

nlohmann::json command_payload(const ControlCommand& cmd) {
  nlohmann::json j;
  j["kind"] = std::string(command_kind_name(cmd.kind));
  if (cmd.kind != CommandKind::Stop) j["value"] = json_number(cmd.value);
  return j;
}

ControlCommand command_from_payload(const nlohmann::json& payload) {
  if (!payload.is_object() || !payload.contains("kind") || !payload["kind"].is_string()) {
    throw Error(Errc::MalformedPayload, "kind: missing or not a string");
  }
  auto kind = parse_command_kind(payload["kind"].get<std::string>());
  if (!kind) throw Error(Errc::MalformedPayload, "kind: unknown command " + payload["kind"].dump());
  ControlCommand c;
  c.kind = *kind;
  if (c.kind != CommandKind::Stop) {
    if (!payload.contains("value") || !payload["value"].is_number()) {
      throw Error(Errc::MalformedPayload, "value: missing or not a number");
    }
    c.value = payload["value"].get<double>();
  }
  return c;
}

nlohmann::json to_json(const AppliedCommand& applied) {
  nlohmann::json cmd = command_payload(applied.command);
  cmd["client_seq"] = applied.command.client_seq;
  cmd["issued_ts_micros"] = applied.command.issued_ts_micros;
  return {{"command", cmd}, {"applied_frame_index", applied.applied_frame_index}};
}

AppliedCommand applied_from_json(const nlohmann::json& j) {
  try {
    AppliedCommand a;
    const auto& cmd = j.at("command");
    a.command = command_from_payload(cmd);
    a.command.client_seq = cmd.value("client_seq", std::uint64_t{0});
    a.command.issued_ts_micros = cmd.value("issued_ts_micros", std::uint64_t{0});
    a.applied_frame_index = j.at("applied_frame_index").get<std::uint64_t>();
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedPayload, std::string("applied command: ") + e.what());
  }
}

}  // namespace remcap
