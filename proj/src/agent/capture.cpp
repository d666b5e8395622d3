// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/agent/capture.hpp"

#include <algorithm>

#include "remcap/agent/renderer.hpp"
#include "remcap/agent/token_bucket.hpp"
#include "remcap/core/error.hpp"

namespace remcap::agent {

nlohmann::json to_json(const SessionSummary& s) {
  return {{"captured_frames", s.captured_frames}, {"delivered_frames", s.delivered_frames},
          {"dropped_frames", s.dropped_frames},   {"duration_s", s.duration_s},
          {"achieved_fps", s.achieved_fps},       {"relay_disconnected", s.relay_disconnected}};
}

SessionSummary summary_from_json(const nlohmann::json& j) {
  SessionSummary s;
  s.captured_frames = j.value("captured_frames", std::uint64_t{0});
  s.delivered_frames = j.value("delivered_frames", std::uint64_t{0});
  s.dropped_frames = j.value("dropped_frames", std::uint64_t{0});
  s.duration_s = j.value("duration_s", 0.0);
  s.achieved_fps = j.value("achieved_fps", 0.0);
  s.relay_disconnected = j.value("relay_disconnected", false);
  return s;
}

double expected_fps(std::uint8_t fps, std::optional<std::uint64_t> budget, std::size_t frame_bytes) {
  if (!budget) return fps;
  return std::min<double>(fps, static_cast<double>(*budget) / static_cast<double>(frame_bytes));
}

CaptureLoop::CaptureLoop(CaptureConfig config, Clock& clock, FrameSender& sender,
                         CaptureObserver* observer)
    : config_(std::move(config)),
      clock_(clock),
      sender_(sender),
      observer_(observer),
      pose_(config_.initial_pose) {
  if (config_.fps < 1 || config_.fps > 120) {
    throw Error(Errc::InvalidArgument, "fps: " + std::to_string(config_.fps) + " outside 1..120");
  }
  if (!(config_.wheelbase > 0.0)) throw Error(Errc::InvalidArgument, "wheelbase: must be > 0");
}

void CaptureLoop::submit(const ControlCommand& cmd) {
  std::lock_guard lock(mu_);
  if (!running_.load()) {
    throw Error(Errc::SessionNotRunning, "session " + config_.session_id.str() + " is not running");
  }
  pending_.push_back(cmd);
}

void CaptureLoop::request_stop() {
  std::lock_guard lock(mu_);
  stop_requested_ = true;
  running_ = false;
}

std::optional<std::uint64_t> CaptureLoop::last_frame_index() const noexcept {
  auto n = captured_.load();
  if (n == 0) return std::nullopt;
  return n - 1;
}

PoseState CaptureLoop::pose() const {
  std::lock_guard lock(mu_);
  return pose_;
}

SessionSummary CaptureLoop::run() {
  const auto fps = config_.fps;
  const double dt = 1.0 / fps;
  const auto t0 = clock_.now_micros();
  auto tick_time = [&](std::uint64_t n) { return deterministic_timestamp(t0, n, fps); };

  SessionSummary summary;
  std::optional<TokenBucket> bucket;
  std::size_t next_script = 0;
  std::vector<std::pair<ControlCommand, bool>> applied;

  for (std::uint64_t n = 0;; ++n) {
    if (stop_requested_.load()) break;
    if (config_.max_frames && n >= *config_.max_frames) break;
    clock_.sleep_until(tick_time(n));

    FrameRecord frame;
    {
      std::lock_guard lock(mu_);
      applied.clear();
      while (next_script < config_.script.size() && config_.script[next_script].at_frame <= n) {
        applied.emplace_back(config_.script[next_script].command.clamped(), true);
        ++next_script;
      }
      while (!pending_.empty()) {
        applied.emplace_back(pending_.front().clamped(), false);
        pending_.pop_front();
      }
      for (const auto& [cmd, scripted] : applied) pose_ = apply_control(pose_, cmd);
      pose_ = step_kinematics(pose_, dt, config_.wheelbase);

      FrameStamp stamp{config_.session_id, config_.device_id,
                       config_.deterministic_clock
                           ? deterministic_timestamp(config_.start_ts_micros, n, fps)
                           : wall_micros()};
      frame = render_frame(pose_, n, config_.preset, stamp, config_.encoding);
      captured_.store(n + 1);
    }
    ++summary.captured_frames;
    if (observer_) {
      for (const auto& [cmd, scripted] : applied) observer_->on_applied({cmd, n}, scripted);
    }

    const Bytes encoded = encode_frame_record(frame);
    bool admit = true;
    if (config_.send_budget_bytes_per_sec) {
      const double size = static_cast<double>(encoded.size());
      const auto now = clock_.now_micros();
      if (!bucket) {
        bucket.emplace(static_cast<double>(*config_.send_budget_bytes_per_sec), 2.0 * size, now);
      } else if (bucket->burst() < 2.0 * size) {
        bucket.emplace(bucket->rate(), 2.0 * size, now);
      }
      auto ready = bucket->ready_at(size, now);
      if (ready && *ready < tick_time(n + 1)) {
        clock_.sleep_until(*ready);
        admit = bucket->try_consume(size, clock_.now_micros());
      } else {
        admit = false;
      }
    }

    if (admit) {
      if (!sender_.send(encoded)) {
        summary.relay_disconnected = true;
        if (observer_) observer_->on_frame(n, false);
        ++summary.dropped_frames;
        break;
      }
      ++summary.delivered_frames;
    } else {
      ++summary.dropped_frames;
    }
    if (observer_) observer_->on_frame(n, admit);
  }

  {
    std::lock_guard lock(mu_);
    running_ = false;
  }
  if (!summary.relay_disconnected) clock_.sleep_until(tick_time(summary.captured_frames));
  summary.duration_s = static_cast<double>(clock_.now_micros() - t0) / 1e6;
  summary.achieved_fps =
      summary.duration_s > 0 ? static_cast<double>(summary.delivered_frames) / summary.duration_s : 0.0;
  return summary;
}

}  // namespace remcap::agent
