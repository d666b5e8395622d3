// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "remcap/core/bounded_queue.hpp"
#include "remcap/core/event.hpp"
#include "remcap/core/frame.hpp"
#include "remcap/inference/detector.hpp"

namespace remcap::inference {

struct FrameMeta {
  Uuid session_id;
  std::uint64_t frame_index = 0;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
};

struct ProcessorOutput {
  Bytes pixels;  // annotated RGB24
  std::vector<Detection> detections;
};

/// Plug-in contract: (decoded RGB24, metadata) -> (pixels, detections).
class FrameProcessor {
 public:
  virtual ~FrameProcessor() = default;
  virtual std::string name() const = 0;
  virtual ProcessorOutput process(ByteView rgb, const FrameMeta& meta) = 0;
};

class MarkerDetector final : public FrameProcessor {
 public:
  std::string name() const override { return "marker-detector"; }
  ProcessorOutput process(ByteView rgb, const FrameMeta& meta) override;
};

/// Name -> factory. Ships with "marker-detector".
class ProcessorRegistry {
 public:
  using Factory = std::function<std::shared_ptr<FrameProcessor>()>;

  ProcessorRegistry();
  void add(const std::string& name, Factory factory);
  /// nullptr for unknown names.
  std::shared_ptr<FrameProcessor> create(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Factory> factories_;
};

/// {"frame": idx, "detections": [...]}
std::string inference_payload(std::uint64_t frame_index, std::span<const Detection> detections);

/// Runs one processor over a session's delivered frames on its own thread.
/// Frames arrive through a drop-oldest queue so a slow processor never stalls
/// ingest. Each processed frame yields an INFERENCE event; a processor that
/// throws yields a LIFECYCLE warning instead and the frame passes through
/// unannotated, as does a frame whose processing overran `deadline`.
class ProcessorTask {
 public:
  struct Sinks {
    /// (kind, frame_index, payload JSON)
    std::function<void(EventKind, std::uint64_t, const std::string&)> event;
    /// Frame for the live view (annotated when processing succeeded in time).
    std::function<void(const FrameRecord&)> frame;
  };

  ProcessorTask(std::shared_ptr<FrameProcessor> processor, Sinks sinks,
                std::chrono::microseconds deadline, std::size_t queue_capacity = 8);
  ~ProcessorTask();

  void offer(const FrameRecord& frame);
  /// Processes everything already queued, then stops the worker.
  void close();

  std::uint64_t processed() const noexcept { return processed_.load(); }
  std::uint64_t failures() const noexcept { return failures_.load(); }
  std::uint64_t late() const noexcept { return late_.load(); }
  std::size_t dropped() const { return queue_.dropped(); }
  const std::string& name() const noexcept { return name_; }

 private:
  void run();

  std::shared_ptr<FrameProcessor> processor_;
  std::string name_;
  Sinks sinks_;
  std::chrono::microseconds deadline_;
  DropOldestQueue<FrameRecord> queue_;
  std::atomic<std::uint64_t> processed_{0};
  std::atomic<std::uint64_t> failures_{0};
  std::atomic<std::uint64_t> late_{0};
  std::thread worker_;
};

}  // namespace remcap::inference
