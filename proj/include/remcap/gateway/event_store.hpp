// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "remcap/core/bounded_queue.hpp"
#include "remcap/core/event.hpp"

namespace remcap::gateway {

using Subscription = std::shared_ptr<DropOldestQueue<std::string>>;

/// In-process publish/subscribe. Each subscriber owns a bounded queue that
/// drops its oldest entries when the subscriber falls behind.
class Broker {
 public:
  explicit Broker(std::size_t capacity = 1024) : capacity_(capacity) {}

  Subscription subscribe(const std::string& channel);
  void unsubscribe(const std::string& channel, const Subscription& sub);
  /// Returns the number of live subscribers reached.
  std::size_t publish(const std::string& channel, const std::string& message);
  void close_all();

 private:
  std::size_t capacity_;
  std::mutex mu_;
  std::map<std::string, std::vector<Subscription>> subs_;
};

std::string events_channel(const Uuid& session_id);
inline constexpr const char* kPackingChannel = "packing";

/// Append-only per-session event log: one JSON line per record in
/// `<dir>/<session>.jsonl`, mirrored in memory. Appends are serialized per
/// session and published to `session.<id>.events` after they are durable.
class EventStore {
 public:
  EventStore(std::filesystem::path dir, Broker& broker);
  ~EventStore();

  void create(const Uuid& session_id);
  bool contains(const Uuid& session_id) const;

  /// Throws UnknownSession, MalformedPayload. Payloads are stored canonical.
  std::uint64_t append(const Uuid& session_id, EventKind kind, std::uint64_t frame_index,
                       const std::string& payload_json);
  /// Events with seq >= from_seq, in seq order. Throws UnknownSession.
  std::vector<EventRecord> read(const Uuid& session_id, std::uint64_t from_seq = 1) const;

  /// Reads a log file written by this store.
  static std::vector<EventRecord> load_file(const std::filesystem::path& path);
  std::filesystem::path path_for(const Uuid& session_id) const;

 private:
  struct Log;
  std::shared_ptr<Log> log(const Uuid& session_id) const;

  std::filesystem::path dir_;
  Broker& broker_;
  mutable std::mutex mu_;
  std::map<Uuid, std::shared_ptr<Log>> logs_;
};

}  // namespace remcap::gateway
