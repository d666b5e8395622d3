// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

// Simulated capture device.

#include <CLI11.hpp>

#include <iostream>

#include "remcap/agent/command_script.hpp"
#include "remcap/core/error.hpp"
#include "remcap/agent/device_agent.hpp"
#include "signals.hpp"

using namespace remcap;

int main(int argc, char** argv) {
  CLI::App app{"remcap simulated capture device"};
  agent::AgentConfig cfg;
  int fps = 30;
  std::string resolution = "360p", relay, gateway, script, encoding = "raw";
  std::uint64_t budget = 0, frames = 0;
  bool once = false;
  app.add_option("--scene", cfg.scene_id, "scene id")->required();
  app.add_option("--device", cfg.device_id, "device id")->required();
  app.add_option("--fps", fps, "capture rate")->check(CLI::Range(1, 120));
  app.add_option("--resolution", resolution, "360p, 720p or 1080p");
  app.add_option("--relay", relay, "relay HOST:PORT")->required();
  app.add_option("--gateway", gateway, "gateway control HOST:PORT")->required();
  app.add_option("--budget", budget, "send budget in bytes per second");
  app.add_flag("--deterministic", cfg.deterministic_clock, "derive timestamps from frame indices");
  app.add_option("--script", script, "command script file")->check(CLI::ExistingFile);
  app.add_option("--frames", frames, "end each session after this many frames");
  app.add_option("--encoding", encoding, "raw or rle")->check(CLI::IsMember({"raw", "rle"}));
  app.add_flag("--once", once, "exit after the first session ends");
  app.add_option("--wheelbase", cfg.wheelbase, "wheelbase in meters");
  CLI11_PARSE(app, argc, argv);

  try {
    cfg.fps = static_cast<std::uint8_t>(fps);
    auto preset = parse_preset(resolution);
    if (!preset) throw remcap::Error(Errc::InvalidArgument, "unknown resolution " + resolution);
    cfg.preset = *preset;
    auto r = net::parse_endpoint(relay);
    auto g = net::parse_endpoint(gateway);
    if (!r || !g) throw remcap::Error(Errc::InvalidArgument, "endpoints must be HOST:PORT");
    cfg.relay = *r;
    cfg.gateway = *g;
    if (budget) cfg.send_budget_bytes_per_sec = budget;
    if (frames) cfg.max_frames = frames;
    if (!script.empty()) cfg.script = agent::load_command_script(script);
    cfg.encoding = encoding == "rle" ? FrameEncoding::RleRgb24 : FrameEncoding::RawRgb24;
    cfg.validate();

    agent::DeviceAgent device(cfg);
    tools::on_termination([&device] { device.shutdown(); });
    device.connect();
    std::cerr << "registered " << cfg.scene_id << "/" << cfg.device_id << "\n";
    device.serve(once);
    if (auto s = device.last_summary()) std::cout << agent::to_json(*s).dump() << std::endl;
  } catch (const std::exception& e) {
    std::cerr << "remcap-agent: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
