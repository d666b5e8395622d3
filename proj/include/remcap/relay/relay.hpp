// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "remcap/core/bounded_queue.hpp"
#include "remcap/core/error.hpp"
#include "remcap/core/event.hpp"
#include "remcap/core/segment.hpp"
#include "remcap/core/session_header.hpp"
#include "remcap/inference/processor.hpp"
#include "remcap/net/tcp.hpp"

namespace remcap::relay {

struct IngestStats {
  Uuid session_id;
  std::uint64_t captured_hint = 0;  // max frame_index seen + 1
  std::uint64_t delivered = 0;
  std::uint64_t bytes_in = 0;  // sum of encoded record lengths
  std::uint64_t first_arrival_micros = 0;
  std::uint64_t last_arrival_micros = 0;

  /// Frames per second over the span between first and last arrival.
  double achieved_fps() const noexcept;
};

nlohmann::json to_json(const IngestStats& s);

struct IngestResult {
  IngestStats stats;
  std::vector<SegmentInfo> segments;
  /// crc32 over every received record, computed independently of the segments.
  std::uint32_t shadow_crc = 0;
  /// False when the stream ended mid-record or was rejected.
  bool clean = true;
  std::optional<Errc> error;
  std::string detail;
};

struct RelayHooks {
  /// Events the relay wants logged (NonMonotoneIndex, INFERENCE, warnings).
  std::function<void(const Uuid&, EventKind, std::uint64_t frame, const std::string& payload)> event;
  /// Called once per finished ingest connection, after all segments are
  /// finalized and attached processors have drained.
  std::function<void(const IngestResult&)> closed;
};

struct RelayOptions {
  std::uint64_t segment_frames = 300;
  std::size_t viewer_queue = 8;
  std::size_t processor_queue = 8;
  /// Upper bound on a single record's payload.
  std::uint32_t max_payload = 32u << 20;
};

using FrameFeed = std::shared_ptr<DropOldestQueue<FrameRecord>>;

enum class Feed { Raw, Annotated };

class Relay {
 public:
  explicit Relay(RelayHooks hooks, RelayOptions options = {});
  ~Relay();
  Relay(const Relay&) = delete;
  Relay& operator=(const Relay&) = delete;

  /// Makes a session eligible for ingest; segments go to `segments_dir`.
  /// `fps` sets the processor deadline until the stream header arrives.
  void expect_session(const Uuid& id, const std::filesystem::path& segments_dir,
                      std::uint8_t fps = 30);

  /// Starts the accept loop. Returns the bound port.
  std::uint16_t listen(const net::Endpoint& ep);
  /// Closes the listener and every active ingest connection.
  void stop();

  /// Runs one ingest connection to completion on the calling thread.
  IngestResult ingest(net::TcpStream& stream);

  /// Frames delivered from now on. Throws UnknownSession.
  FrameFeed subscribe_live(const Uuid& id, Feed feed = Feed::Raw);
  void unsubscribe(const Uuid& id, const FrameFeed& feed);

  /// Routes each delivered frame through `processor`. The per-frame deadline
  /// is one frame interval. Throws UnknownSession, SessionNotLive.
  void attach_processor(const Uuid& id, std::shared_ptr<inference::FrameProcessor> processor);
  std::vector<std::string> processors(const Uuid& id) const;

  /// Throws UnknownSession.
  IngestStats stats(const Uuid& id) const;
  bool ingest_active(const Uuid& id) const;
  std::size_t active_ingests() const;
  std::uint64_t total_ingests() const noexcept { return total_ingests_.load(); }

 private:
  struct Channel;
  std::shared_ptr<Channel> channel(const Uuid& id) const;
  void fan_out(Channel& ch, const FrameRecord& frame);

  RelayHooks hooks_;
  RelayOptions options_;

  mutable std::mutex mu_;
  std::map<Uuid, std::shared_ptr<Channel>> channels_;
  std::set<net::TcpStream*> active_streams_;

  std::unique_ptr<net::TcpListener> listener_;
  std::thread accept_thread_;
  std::mutex conn_mu_;
  std::vector<std::thread> connection_threads_;
  std::atomic<bool> stopping_{false};
  std::atomic<std::uint64_t> total_ingests_{0};
};

}  // namespace remcap::relay
