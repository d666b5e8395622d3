// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "remcap/agent/capture.hpp"
#include "remcap/net/tcp.hpp"

namespace remcap::agent {

struct AgentConfig {
  std::string scene_id;
  std::uint16_t device_id = 0;
  std::uint8_t fps = 30;
  Preset preset = Preset::P360;
  double wheelbase = kDefaultWheelbase;
  bool deterministic_clock = false;
  net::Endpoint relay;
  net::Endpoint gateway;
  std::optional<std::uint64_t> send_budget_bytes_per_sec;
  std::vector<ScriptedCommand> script;
  /// Ends each session on its own after this many frames.
  std::optional<std::uint64_t> max_frames;
  FrameEncoding encoding = FrameEncoding::RawRgb24;
  std::string capabilities = "camera,drive";

  /// Throws InvalidArgument.
  void validate() const;
};

/// The simulated capture device as a network peer. It registers with the
/// gateway's control channel, then waits for start/command/stop messages.
/// Frames go to the relay over a separate connection that opens with the
/// 64-byte session header.
///
/// Control messages are newline-delimited JSON objects with a "type" field:
///   agent -> gateway: register, started, start_failed, ack, nack, ended, event, pong
///   gateway -> agent: registered, error, start, command, stop, ping
class DeviceAgent {
 public:
  explicit DeviceAgent(AgentConfig config);
  ~DeviceAgent();
  DeviceAgent(const DeviceAgent&) = delete;
  DeviceAgent& operator=(const DeviceAgent&) = delete;

  /// Connects and registers. Throws GatewayUnreachable.
  void connect();
  /// Processes control messages until the gateway goes away, shutdown() is
  /// called, or (with `once`) the first session ends.
  void serve(bool once = false);
  void shutdown();

  std::optional<SessionSummary> last_summary() const;
  const AgentConfig& config() const noexcept { return config_; }

 private:
  class Session;

  void handle(const nlohmann::json& msg);
  void start_session(const nlohmann::json& msg);
  void finish_session();
  bool send(const nlohmann::json& msg);

  AgentConfig config_;
  std::unique_ptr<net::LineChannel> control_;
  std::atomic<bool> shutting_down_{false};
  bool once_ = false;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::unique_ptr<Session> session_;
  std::optional<SessionSummary> last_summary_;
  std::uint64_t sessions_ended_ = 0;
};

/// Registers, runs exactly one session to completion, and returns its summary.
/// Throws GatewayUnreachable or RelayDisconnected.
SessionSummary run_capture(const AgentConfig& config);

}  // namespace remcap::agent
