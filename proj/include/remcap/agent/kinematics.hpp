// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <numbers>

#include "remcap/core/command.hpp"

namespace remcap::agent {

inline constexpr double kMaxSpeedMps = 0.5;
inline constexpr double kDefaultWheelbase = 0.25;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Simulated car pose. Angles in radians, distances in meters.
struct PoseState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  double steering = 0.0;
  double cam_pan = 0.0;
  double cam_tilt = 0.0;

  friend bool operator==(const PoseState&, const PoseState&) = default;
};

/// Forward-Euler kinematic bicycle step; position uses the heading from before
/// the step. Control fields are left untouched.
PoseState step_kinematics(const PoseState& state, double dt, double wheelbase = kDefaultWheelbase);

/// Applies a command's (clamped) control value to the pose.
PoseState apply_control(const PoseState& state, const ControlCommand& cmd);

}  // namespace remcap::agent
