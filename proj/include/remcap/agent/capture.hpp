// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "remcap/agent/command_script.hpp"
#include "remcap/agent/kinematics.hpp"
#include "remcap/core/clock.hpp"
#include "remcap/core/command.hpp"
#include "remcap/core/frame.hpp"

namespace remcap::agent {

struct CaptureConfig {
  Uuid session_id;
  std::uint16_t device_id = 0;
  std::uint8_t fps = 30;
  Preset preset = Preset::P360;
  double wheelbase = kDefaultWheelbase;
  bool deterministic_clock = false;
  std::uint64_t start_ts_micros = 0;
  std::optional<std::uint64_t> send_budget_bytes_per_sec;
  std::optional<std::uint64_t> max_frames;
  FrameEncoding encoding = FrameEncoding::RawRgb24;
  std::vector<ScriptedCommand> script;
  PoseState initial_pose;
};

struct SessionSummary {
  std::uint64_t captured_frames = 0;
  std::uint64_t delivered_frames = 0;
  std::uint64_t dropped_frames = 0;
  double duration_s = 0.0;
  double achieved_fps = 0.0;
  bool relay_disconnected = false;
};

nlohmann::json to_json(const SessionSummary& s);
SessionSummary summary_from_json(const nlohmann::json& j);

/// Receives encoded frames admitted by the bandwidth budget.
class FrameSender {
 public:
  virtual ~FrameSender() = default;
  /// False means the downstream connection is gone.
  virtual bool send(const Bytes& encoded_record) = 0;
};

class CaptureObserver {
 public:
  virtual ~CaptureObserver() = default;
  /// Called after the frame `applied.applied_frame_index` has been rendered.
  virtual void on_applied(const AppliedCommand& applied, bool scripted) = 0;
  virtual void on_frame(std::uint64_t /*frame_index*/, bool /*delivered*/) {}
};

/// One device's capture loop. Each tick: advance the counter, apply pending
/// commands, step kinematics by 1/fps, render, then offer the frame to the
/// sender through the token bucket. A frame that cannot be admitted before
/// the next tick is dropped; the counter keeps advancing regardless.
class CaptureLoop {
 public:
  CaptureLoop(CaptureConfig config, Clock& clock, FrameSender& sender,
              CaptureObserver* observer = nullptr);

  /// Queues a command for the next frame boundary. Throws SessionNotRunning
  /// once the loop has finished or been asked to stop.
  void submit(const ControlCommand& cmd);
  void request_stop();

  /// Runs until stop, max_frames, or a send failure.
  SessionSummary run();

  bool running() const noexcept { return running_.load(); }
  /// Index of the most recently captured frame, if any.
  std::optional<std::uint64_t> last_frame_index() const noexcept;
  PoseState pose() const;

  const CaptureConfig& config() const noexcept { return config_; }

 private:
  CaptureConfig config_;
  Clock& clock_;
  FrameSender& sender_;
  CaptureObserver* observer_;

  std::atomic<bool> running_{true};
  std::atomic<bool> stop_requested_{false};
  std::atomic<std::uint64_t> captured_{0};

  mutable std::mutex mu_;
  std::deque<ControlCommand> pending_;
  PoseState pose_;
};

/// Frames the budget admits per second for a frame of `frame_bytes`, capped at fps.
double expected_fps(std::uint8_t fps, std::optional<std::uint64_t> budget, std::size_t frame_bytes);

}  // namespace remcap::agent
