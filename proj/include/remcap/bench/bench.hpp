// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "remcap/core/resolution.hpp"
#include "remcap/net/tcp.hpp"

namespace remcap::stack {
class LocalStack;
}

namespace remcap::bench {

/// Where the stack under test listens. Without endpoints the harness starts
/// its own in-process stack.
struct StackTarget {
  std::optional<net::Endpoint> http;
  std::optional<net::Endpoint> control;
  std::optional<net::Endpoint> relay;
  std::string scene_id = "lab";
  std::uint16_t device_id = 1;
  /// A second device of the same scene, used to time registrations.
  std::uint16_t spare_device_id = 2;
  std::string researcher = "bench";
};

/// A stack the harness can drive: either borrowed endpoints or its own.
class StackHandle {
 public:
  /// Throws StackUnreachable when the target does not answer GET /ping.
  explicit StackHandle(const StackTarget& target);
  ~StackHandle();
  StackHandle(const StackHandle&) = delete;
  StackHandle& operator=(const StackHandle&) = delete;

  const StackTarget& target() const noexcept { return target_; }
  net::Endpoint http() const;
  net::Endpoint control() const;
  net::Endpoint relay() const;
  /// Deletes a finished session's container when the stack is our own, so
  /// long sweeps do not fill the disk. No-op for external stacks.
  void discard_session(const std::string& session_id);

 private:
  StackTarget target_;
  std::unique_ptr<stack::LocalStack> local_;
};

/// min(source_fps, budget / encoded_frame_size); source_fps when unconstrained.
double expected_fps(Preset preset, std::optional<std::uint64_t> budget_bytes_per_sec,
                    std::uint8_t source_fps);

struct FpsReport {
  Preset resolution = Preset::P360;
  std::optional<std::uint64_t> budget_bytes_per_sec;
  std::uint8_t source_fps = 30;
  double achieved_fps = 0.0;
  double expected_fps = 0.0;
  double duration_s = 0.0;
  std::uint64_t captured = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
};

nlohmann::json to_json(const FpsReport& r);

/// Runs one deterministic agent for `duration_s` under the budget and reads
/// the relay's statistics. Throws StackUnreachable, InvalidArgument.
FpsReport measure_fps(StackHandle& stack, Preset preset,
                      std::optional<std::uint64_t> budget_bytes_per_sec, double duration_s,
                      std::uint8_t source_fps = 30);

struct TaskLatency {
  std::string name;
  double mean_ms = 0.0;
  double std_ms = 0.0;  // population
  std::uint32_t runs = 0;
  std::vector<double> samples_ms;
};

struct LatencyReport {
  std::vector<TaskLatency> tasks;
};

/// Row names in report order.
const std::vector<std::string>& latency_task_names();

/// Population mean and standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& samples);

nlohmann::json to_json(const LatencyReport& r);

/// Times the four tasks `runs` times each. Throws StackUnreachable, InvalidArgument.
LatencyReport measure_task_latencies(StackHandle& stack, std::uint32_t runs);

/// CSV with header `ts,process,cpu,rss`: one row per process per interval.
/// `cpu` is percent of one core over the interval, `rss` is bytes.
/// Names match /proc/<pid>/comm or the basename of argv[0]; all matching
/// processes are summed. Throws ProcessNotFound, InvalidArgument.
std::string sample_resources(const std::vector<std::string>& process_names,
                             std::chrono::milliseconds interval, double duration_s);

/// Pids whose comm or argv[0] basename equals `name`.
std::vector<int> find_processes(const std::string& name);

}  // namespace remcap::bench
