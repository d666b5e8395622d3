// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "remcap/core/event.hpp"
#include "remcap/core/manifest.hpp"
#include "remcap/core/srt.hpp"
#include "remcap/gateway/gateway.hpp"

namespace remcap::packer {

/// Writes `session.srt` and `manifest.json` for segments already on disk.
/// Checks each listed segment (MissingSegment, ChecksumMismatch) and sorts
/// `events` by (frame_index, seq). Returns the manifest written.
SessionManifest write_container(const ContainerLayout& layout, SessionManifest manifest,
                                std::vector<EventRecord> events);

/// Packs a STOPPING session. On a PACKED session it re-verifies segment
/// checksums and returns the stored manifest.
/// Throws SessionNotStopped, MissingSegment, ChecksumMismatch, UnknownSession.
SessionManifest pack_session(gateway::Gateway& gateway, const Uuid& session_id);

struct VerificationCheck {
  std::string name;
  bool passed = true;
  std::optional<std::uint64_t> first_offending_frame;
  std::string detail;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;  // segments, frame_index, command_range, resimulation
  std::uint64_t frames_checked = 0;

  bool passed() const noexcept;
  const VerificationCheck& check(const std::string& name) const;
};

nlohmann::json to_json(const VerificationReport& report);

/// Uses only the container's contents. Throws NotAContainer, ManifestParseError.
VerificationReport verify_container(const std::filesystem::path& root);

/// Reads manifest.json. Throws NotAContainer, ManifestParseError.
SessionManifest read_manifest(const std::filesystem::path& root);

struct ReplayItem {
  FrameRecord frame;
  std::vector<SrtCue> cues;  // cues whose [start, end) covers the frame's timestamp
};

/// Delivered frames in order from the first one with frame_index >= from_frame.
class ReplayReader {
 public:
  /// Throws NotAContainer, ManifestParseError, FrameOutOfRange.
  ReplayReader(const std::filesystem::path& root, std::uint64_t from_frame);
  ~ReplayReader();

  std::optional<ReplayItem> next();
  const SessionManifest& manifest() const noexcept { return manifest_; }
  const std::vector<SrtCue>& cues() const noexcept { return cues_; }

 private:
  std::optional<FrameRecord> read_frame();
  std::vector<SrtCue> cues_at(std::uint64_t frame_index) const;

  ContainerLayout layout_;
  SessionManifest manifest_;
  std::vector<SrtCue> cues_;
  std::size_t segment_ = 0;
  std::unique_ptr<SegmentReader> reader_;
  std::optional<FrameRecord> pending_;
};

std::vector<ReplayItem> replay(const std::filesystem::path& root, std::uint64_t from_frame,
                               std::size_t max_items = SIZE_MAX);

/// Packs sessions as their ids arrive on the "packing" channel.
class PackingService {
 public:
  explicit PackingService(gateway::Gateway& gateway);
  ~PackingService();
  void stop();

  std::uint64_t packed() const noexcept { return packed_.load(); }
  std::uint64_t failed() const noexcept { return failed_.load(); }
  std::optional<std::string> last_error() const;

 private:
  void run();

  gateway::Gateway& gateway_;
  gateway::Subscription sub_;
  std::thread worker_;
  std::atomic<std::uint64_t> packed_{0};
  std::atomic<std::uint64_t> failed_{0};
  mutable std::mutex mu_;
  std::optional<std::string> last_error_;
};

}  // namespace remcap::packer
