// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/stack/local_stack.hpp"

#include <random>

namespace remcap::stack {

gateway::SceneRegistry default_scenes() {
  auto scene = [](std::string id, std::vector<std::uint16_t> devices, std::string text) {
    gateway::SceneConfig s{std::move(id), {}, std::move(text)};
    for (auto d : devices) s.devices.push_back({d, "camera,drive"});
    return s;
  };
  return gateway::SceneRegistry({scene("lab", {1, 2, 3}, "indoor track"),
                                 scene("yard", {1, 2}, "outdoor course")});
}

RunningAgent::RunningAgent(agent::AgentConfig config)
    : agent_(std::make_unique<agent::DeviceAgent>(std::move(config))) {
  agent_->connect();
  thread_ = std::thread([this] { agent_->serve(); });
}

RunningAgent::~RunningAgent() { stop(); }

void RunningAgent::stop() {
  agent_->shutdown();
  if (thread_.joinable()) thread_.join();
}

namespace {

std::filesystem::path make_temp_root() {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    auto p = base / ("remcap-" + std::to_string(rd()));
    if (std::filesystem::create_directory(p)) return p;
  }
}

}  // namespace

LocalStack::LocalStack(StackOptions options)
    : http_ep_(options.http),
      ws_ep_(options.ws),
      relay_ep_(options.relay),
      control_ep_(options.control) {
  if (options.data_root.empty()) {
    data_root_ = make_temp_root();
    owns_root_ = true;
  } else {
    data_root_ = options.data_root;
    std::filesystem::create_directories(data_root_);
  }
  gateway::GatewayOptions gopts;
  gopts.data_root = data_root_;
  gopts.agent_timeout = options.agent_timeout;
  gateway_ = std::make_unique<gateway::Gateway>(options.scenes ? *options.scenes : default_scenes(),
                                                gopts, clock_);
  control_ep_.port = gateway_->listen_control(control_ep_);
  relay_ep_.port = gateway_->listen_relay(relay_ep_);
  if (options.packing) packing_ = std::make_unique<packer::PackingService>(*gateway_);
  http_ = std::make_unique<HttpApi>(*gateway_, processors_);
  http_ep_.port = http_->listen(http_ep_);
  ws_ = std::make_unique<WsServer>(*gateway_);
  ws_ep_.port = ws_->listen(ws_ep_);
}

LocalStack::~LocalStack() {
  shutdown();
  if (owns_root_) {
    std::error_code ec;
    std::filesystem::remove_all(data_root_, ec);
  }
}

std::unique_ptr<RunningAgent> LocalStack::launch_agent(agent::AgentConfig config) {
  config.gateway = control_endpoint();
  config.relay = relay_endpoint();
  const auto scene = config.scene_id;
  const auto device = config.device_id;
  auto running = std::make_unique<RunningAgent>(std::move(config));
  if (!gateway_->wait_for_device(scene, device, gateway_->options().agent_timeout)) {
    throw Error(Errc::AgentTimeout, "device " + scene + "/" + std::to_string(device) +
                                        " did not register");
  }
  return running;
}

void LocalStack::shutdown() {
  if (down_) return;
  down_ = true;
  if (ws_) ws_->stop();
  if (http_) http_->stop();
  if (packing_) packing_->stop();
  gateway_->shutdown();
}

}  // namespace remcap::stack
