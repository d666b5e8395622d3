// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/agent/kinematics.hpp"

#include <cmath>

namespace remcap::agent {

PoseState step_kinematics(const PoseState& s, double dt, double wheelbase) {
  PoseState n = s;
  n.x = s.x + s.speed * std::cos(s.heading) * dt;
  n.y = s.y + s.speed * std::sin(s.heading) * dt;
  n.heading = s.heading + (s.speed / wheelbase) * std::tan(s.steering) * dt;
  return n;
}

PoseState apply_control(const PoseState& state, const ControlCommand& cmd) {
  const auto c = cmd.clamped();
  PoseState s = state;
  switch (c.kind) {
    case CommandKind::SetSpeed: s.speed = c.value / 100.0 * kMaxSpeedMps; break;
    case CommandKind::SetSteering: s.steering = deg_to_rad(c.value); break;
    case CommandKind::SetCamPan: s.cam_pan = deg_to_rad(c.value); break;
    case CommandKind::SetCamTilt: s.cam_tilt = deg_to_rad(c.value); break;
    case CommandKind::Stop:
      s.speed = 0.0;
      s.steering = 0.0;
      break;
  }
  return s;
}

}  // namespace remcap::agent
