// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "remcap/agent/device_agent.hpp"
#include "remcap/core/clock.hpp"
#include "remcap/gateway/gateway.hpp"
#include "remcap/inference/processor.hpp"
#include "remcap/packer/packer.hpp"
#include "remcap/stack/http_api.hpp"
#include "remcap/stack/ws_server.hpp"

namespace remcap::stack {

/// Scenes "lab" (devices 1, 2, 3) and "yard" (devices 1, 2).
gateway::SceneRegistry default_scenes();

struct StackOptions {
  /// Empty: a fresh temporary directory removed on destruction.
  std::filesystem::path data_root;
  std::optional<gateway::SceneRegistry> scenes;
  std::chrono::milliseconds agent_timeout{2000};
  /// Port 0 picks a free port.
  net::Endpoint http;
  net::Endpoint ws;
  net::Endpoint relay;
  net::Endpoint control;
  bool packing = true;
};

/// A device agent serving on its own thread.
class RunningAgent {
 public:
  explicit RunningAgent(agent::AgentConfig config);
  ~RunningAgent();
  RunningAgent(const RunningAgent&) = delete;
  RunningAgent& operator=(const RunningAgent&) = delete;

  agent::DeviceAgent& agent() noexcept { return *agent_; }
  void stop();

 private:
  std::unique_ptr<agent::DeviceAgent> agent_;
  std::thread thread_;
};

/// Gateway, relay, packer, HTTP and WebSocket servers in one process.
class LocalStack {
 public:
  explicit LocalStack(StackOptions options = {});
  ~LocalStack();
  LocalStack(const LocalStack&) = delete;
  LocalStack& operator=(const LocalStack&) = delete;

  gateway::Gateway& gateway() noexcept { return *gateway_; }
  inference::ProcessorRegistry& processors() noexcept { return processors_; }
  packer::PackingService* packing() noexcept { return packing_.get(); }
  const std::filesystem::path& data_root() const noexcept { return data_root_; }

  net::Endpoint http_endpoint() const { return http_ep_; }
  net::Endpoint ws_endpoint() const { return ws_ep_; }
  net::Endpoint relay_endpoint() const { return relay_ep_; }
  net::Endpoint control_endpoint() const { return control_ep_; }

  /// Fills in the endpoints, starts the agent, and waits for it to register.
  /// Throws AgentTimeout if it does not register in time.
  std::unique_ptr<RunningAgent> launch_agent(agent::AgentConfig config);

  void shutdown();

 private:
  std::filesystem::path data_root_;
  bool owns_root_ = false;
  WallClock clock_;
  inference::ProcessorRegistry processors_;
  std::unique_ptr<gateway::Gateway> gateway_;
  std::unique_ptr<packer::PackingService> packing_;
  std::unique_ptr<HttpApi> http_;
  std::unique_ptr<WsServer> ws_;
  net::Endpoint http_ep_;
  net::Endpoint ws_ep_;
  net::Endpoint relay_ep_;
  net::Endpoint control_ep_;
  bool down_ = false;
};

}  // namespace remcap::stack
