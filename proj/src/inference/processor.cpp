// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/inference/processor.hpp"

#include <exception>

namespace remcap::inference {

ProcessorOutput MarkerDetector::process(ByteView rgb, const FrameMeta& meta) {
  ProcessorOutput out;
  out.detections = detect_marker(rgb, meta.width, meta.height);
  out.pixels.assign(rgb.begin(), rgb.end());
  annotate_pixels(out.pixels, meta.width, meta.height, out.detections);
  return out;
}

ProcessorRegistry::ProcessorRegistry() {
  auto shared = std::make_shared<MarkerDetector>();  // stateless
  add("marker-detector", [shared] { return shared; });
}

void ProcessorRegistry::add(const std::string& name, Factory factory) {
  factories_[name] = std::move(factory);
}

std::shared_ptr<FrameProcessor> ProcessorRegistry::create(const std::string& name) const {
  auto it = factories_.find(name);
  return it == factories_.end() ? nullptr : it->second();
}

std::vector<std::string> ProcessorRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : factories_) out.push_back(name);
  return out;
}

std::string inference_payload(std::uint64_t frame_index, std::span<const Detection> detections) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& d : detections) arr.push_back(to_json(d));
  return nlohmann::json{{"frame", frame_index}, {"detections", arr}}.dump();
}

ProcessorTask::ProcessorTask(std::shared_ptr<FrameProcessor> processor, Sinks sinks,
                             std::chrono::microseconds deadline, std::size_t queue_capacity)
    : processor_(std::move(processor)),
      name_(processor_->name()),
      sinks_(std::move(sinks)),
      deadline_(deadline),
      queue_(queue_capacity),
      worker_([this] { run(); }) {}

ProcessorTask::~ProcessorTask() { close(); }

void ProcessorTask::offer(const FrameRecord& frame) { queue_.push(frame); }

void ProcessorTask::close() {
  queue_.close();
  if (worker_.joinable()) worker_.join();
}

void ProcessorTask::run() {
  while (auto frame = queue_.pop()) {
    const FrameMeta meta{frame->session_id, frame->frame_index, frame->width, frame->height};
    const auto started = std::chrono::steady_clock::now();
    try {
      ProcessorOutput out = processor_->process(frame->pixels(), meta);
      const bool in_time = std::chrono::steady_clock::now() - started <= deadline_;
      if (sinks_.event)
        sinks_.event(EventKind::Inference, frame->frame_index,
                     inference_payload(frame->frame_index, out.detections));
      ++processed_;
      if (in_time) {
        FrameRecord annotated = *frame;
        annotated.payload = frame->encoding == FrameEncoding::RleRgb24
                                ? rle_encode(out.pixels)
                                : std::move(out.pixels);
        if (sinks_.frame) sinks_.frame(annotated);
      } else {
        ++late_;
        if (sinks_.frame) sinks_.frame(*frame);
      }
    } catch (const std::exception& e) {
      ++failures_;
      if (sinks_.event)
        sinks_.event(EventKind::Lifecycle, frame->frame_index,
                     nlohmann::json{{"event", "processor_warning"},
                                    {"processor", name_},
                                    {"frame", frame->frame_index},
                                    {"error", e.what()}}
                         .dump());
      if (sinks_.frame) sinks_.frame(*frame);
    }
  }
}

}  // namespace remcap::inference
