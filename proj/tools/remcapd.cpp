// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

// The capture stack daemon: gateway, relay, packer, HTTP and WebSocket APIs.

#include <CLI11.hpp>

#include <future>
#include <iostream>

#include "remcap/stack/local_stack.hpp"
#include "signals.hpp"

using namespace remcap;

namespace {

net::Endpoint endpoint(const std::string& text, const char* flag) {
  auto ep = net::parse_endpoint(text);
  if (!ep) throw CLI::ValidationError(flag, "expected HOST:PORT, got " + text);
  return *ep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"remcap stack daemon"};
  std::string data = "remcap-data";
  std::string http = "127.0.0.1:8080", ws = "127.0.0.1:8081";
  std::string relay = "127.0.0.1:9000", control = "127.0.0.1:9001";
  std::string scenes;
  int timeout_ms = 2000;
  app.add_option("--data", data, "data directory (event logs and containers)");
  app.add_option("--http", http, "HTTP API endpoint");
  app.add_option("--ws", ws, "WebSocket endpoint");
  app.add_option("--relay", relay, "frame ingest endpoint for agents");
  app.add_option("--control", control, "control channel endpoint for agents");
  app.add_option("--scenes", scenes, "scene registry JSON file")->check(CLI::ExistingFile);
  app.add_option("--agent-timeout-ms", timeout_ms, "agent reply timeout")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::promise<void> stop;
  tools::on_termination([&stop] { stop.set_value(); });
  try {
    stack::StackOptions o;
    o.data_root = data;
    if (!scenes.empty()) o.scenes = gateway::SceneRegistry::load(scenes);
    o.agent_timeout = std::chrono::milliseconds(timeout_ms);
    o.http = endpoint(http, "--http");
    o.ws = endpoint(ws, "--ws");
    o.relay = endpoint(relay, "--relay");
    o.control = endpoint(control, "--control");
    stack::LocalStack s(o);
    std::cout << nlohmann::json{{"http", s.http_endpoint().str()},
                                {"ws", s.ws_endpoint().str()},
                                {"relay", s.relay_endpoint().str()},
                                {"control", s.control_endpoint().str()},
                                {"data", s.data_root().string()}}
                     .dump()
              << std::endl;
    stop.get_future().wait();
    s.shutdown();
  } catch (const std::exception& e) {
    std::cerr << "remcapd: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
