// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

// Evaluation harness: FPS under a bandwidth budget, task latencies, resources.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "remcap/bench/bench.hpp"
#include "remcap/core/error.hpp"

using namespace remcap;
using nlohmann::json;

namespace {

std::optional<net::Endpoint> endpoint(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto ep = net::parse_endpoint(text);
  if (!ep) throw remcap::Error(Errc::InvalidArgument, "expected HOST:PORT, got " + text);
  return ep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"remcap benchmark harness"};
  app.require_subcommand(1);
  std::string out;
  std::string http, control, relay;
  bench::StackTarget target;
  app.add_option("--out", out, "write the report here instead of stdout");
  auto target_opts = [&](CLI::App* sub) {
    sub->add_option("--http", http, "HTTP API of an existing stack");
    sub->add_option("--control", control, "agent control endpoint of that stack");
    sub->add_option("--relay", relay, "relay endpoint of that stack");
    sub->add_option("--scene", target.scene_id, "scene to capture in");
    sub->add_option("--device", target.device_id, "device to capture with");
    sub->add_option("--researcher", target.researcher, "lease holder name");
  };

  auto* fps = app.add_subcommand("fps", "achieved FPS under a send budget");
  std::string resolution = "360p";
  std::uint64_t budget = 0;
  double duration = 10;
  int source_fps = 30, reps = 1;
  fps->add_option("--resolution", resolution, "360p, 720p or 1080p")->required();
  fps->add_option("--budget", budget, "bytes per second; 0 = unconstrained");
  fps->add_option("--duration", duration, "seconds per run (at least 5)");
  fps->add_option("--fps", source_fps, "source frame rate")->check(CLI::Range(1, 120));
  fps->add_option("--reps", reps, "repetitions")->check(CLI::PositiveNumber);
  target_opts(fps);

  auto* latency = app.add_subcommand("latency", "the four task latencies");
  std::uint32_t runs = 10;
  latency->add_option("--runs", runs, "repetitions per task")->check(CLI::PositiveNumber);
  latency->add_option("--spare-device", target.spare_device_id, "device used to time registration");
  target_opts(latency);

  auto* resources = app.add_subcommand("resources", "sample CPU and RSS of named processes");
  std::vector<std::string> procs;
  int interval = 500;
  double res_duration = 10;
  resources->add_option("--procs", procs, "process names")->delimiter(',')->required();
  resources->add_option("--interval", interval, "milliseconds")->check(CLI::PositiveNumber);
  resources->add_option("--duration", res_duration, "seconds");

  CLI11_PARSE(app, argc, argv);

  try {
    std::string text;
    target.http = endpoint(http);
    target.control = endpoint(control);
    target.relay = endpoint(relay);
    if (fps->parsed()) {
      auto preset = parse_preset(resolution);
      if (!preset) throw remcap::Error(Errc::InvalidArgument, "unknown resolution " + resolution);
      std::optional<std::uint64_t> b;
      if (budget) b = budget;
      bench::StackHandle stack(target);
      json runs_json = json::array();
      double sum = 0;
      for (int i = 0; i < reps; ++i) {
        auto r = bench::measure_fps(stack, *preset, b, duration, static_cast<std::uint8_t>(source_fps));
        sum += r.achieved_fps;
        runs_json.push_back(bench::to_json(r));
      }
      text = json{{"report", "fps"},
                  {"resolution", resolution},
                  {"budget_bytes_per_sec", b ? json(*b) : json(nullptr)},
                  {"expected_fps", bench::expected_fps(*preset, b, static_cast<std::uint8_t>(source_fps))},
                  {"achieved_fps_mean", sum / reps},
                  {"runs", runs_json}}
                 .dump(2);
    } else if (latency->parsed()) {
      bench::StackHandle stack(target);
      json j = bench::to_json(bench::measure_task_latencies(stack, runs));
      j["report"] = "latency";
      j["runs"] = runs;
      text = j.dump(2);
    } else {
      text = bench::sample_resources(procs, std::chrono::milliseconds(interval), res_duration);
    }
    if (!text.empty() && text.back() != '\n') text += '\n';
    if (out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out, std::ios::binary);
      f << text;
      if (!f) throw remcap::Error(Errc::IoError, "cannot write " + out);
    }
  } catch (const std::exception& e) {
    std::cerr << "remcap-bench: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
