// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "remcap/core/clock.hpp"
#include "remcap/core/command.hpp"
#include "remcap/gateway/event_store.hpp"
#include "remcap/gateway/lease_table.hpp"
#include "remcap/gateway/scene.hpp"
#include "remcap/gateway/session.hpp"
#include "remcap/net/tcp.hpp"
#include "remcap/relay/relay.hpp"

namespace remcap::gateway {

struct GatewayOptions {
  std::filesystem::path data_root;
  std::chrono::milliseconds agent_timeout{2000};
  std::uint32_t default_lease_ttl = kDefaultLeaseTtlSeconds;
  std::size_t subscription_capacity = 1024;
  relay::RelayOptions relay;
};

/// What a registered agent told the gateway about itself.
struct AgentInfo {
  std::string scene_id;
  std::uint16_t device_id = 0;
  std::uint8_t fps = 30;
  Preset resolution = Preset::P360;
  double wheelbase = 0.25;
  bool deterministic = false;
  std::string capabilities;
};

/// Full record of a session as the packer needs it.
struct SessionInfo {
  SessionState state;
  std::string researcher;
  AgentInfo agent;
  std::uint64_t start_ts_micros = 0;
  std::filesystem::path container_dir;
  std::optional<relay::IngestResult> ingest;
  /// Frames the agent reported rendering, when it reported.
  std::optional<std::uint64_t> agent_captured;
  /// True once the "packing" message has been published.
  bool finalized = false;

  /// max(relay captured_hint, agent captured count).
  std::uint64_t frame_count() const noexcept;
};

struct CommandResult {
  AppliedCommand applied;
  std::uint64_t round_trip_micros = 0;
  std::uint64_t event_seq = 0;
};

/// Control plane. Owns the relay so ingest closes feed the session lifecycle.
class Gateway {
 public:
  Gateway(SceneRegistry scenes, GatewayOptions options, Clock& lease_clock);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  std::uint16_t listen_control(const net::Endpoint& ep);
  std::uint16_t listen_relay(const net::Endpoint& ep);
  void shutdown();

  // Scenes and leases.
  const SceneRegistry& scenes() const noexcept { return scenes_; }
  nlohmann::json scenes_json() const;
  /// Throws UnknownScene, SceneBusyError.
  SceneLease acquire_lease(const std::string& researcher, const std::string& scene_id,
                           std::optional<std::uint32_t> ttl_seconds = std::nullopt);
  /// Throws LeaseInvalid.
  void release_lease(const std::string& scene_id, const std::string& researcher);

  // Agents.
  bool device_online(const std::string& scene_id, std::uint16_t device_id) const;
  /// Waits until the device has registered.
  bool wait_for_device(const std::string& scene_id, std::uint16_t device_id,
                       std::chrono::milliseconds timeout) const;

  // Sessions.
  using ProcessorFactory = std::function<std::shared_ptr<inference::FrameProcessor>()>;
  /// Throws LeaseInvalid, UnknownDevice, DeviceOffline, DeviceBusy, AgentTimeout.
  /// Each factory yields one processor per session, attached before capture starts.
  std::vector<SessionState> start_parallel_capture(
      const SceneLease& lease, const std::vector<std::uint16_t>& device_ids,
      const std::vector<ProcessorFactory>& processors = {});
  /// Throws UnknownSession, SessionNotLive, LeaseInvalid, AgentTimeout.
  CommandResult submit_command(const Uuid& session_id, const std::string& researcher,
                               const ControlCommand& command);
  /// Stops capture and waits for the packing hand-off.
  /// Throws UnknownSession, SessionNotLive, LeaseInvalid, AgentTimeout.
  SessionState stop_session(const Uuid& session_id, const std::string& researcher);

  SessionState session(const Uuid& session_id) const;
  SessionInfo session_info(const Uuid& session_id) const;
  std::vector<SessionState> sessions() const;
  bool wait_for_status(const Uuid& session_id, SessionStatus at_least,
                       std::chrono::milliseconds timeout) const;
  /// Called by the packer. Appends the "packed" LIFECYCLE event.
  void mark_packed(const Uuid& session_id, const SessionManifest& manifest);

  // Event log.
  std::uint64_t append_event(const Uuid& session_id, EventKind kind, std::uint64_t frame_index,
                             const std::string& payload_json);
  std::uint64_t add_marker(const Uuid& session_id, std::uint64_t frame_index,
                           const std::string& text);
  std::vector<EventRecord> read_events(const Uuid& session_id, std::uint64_t from_seq = 1) const;
  Subscription subscribe(const std::string& channel) { return broker_.subscribe(channel); }
  void unsubscribe(const std::string& channel, const Subscription& sub) {
    broker_.unsubscribe(channel, sub);
  }

  Broker& broker() noexcept { return broker_; }
  EventStore& events() noexcept { return events_; }
  LeaseTable& leases() noexcept { return leases_; }
  relay::Relay& relay() noexcept { return *relay_; }
  const GatewayOptions& options() const noexcept { return options_; }

 private:
  class AgentLink;
  struct Session;

  void serve_agent(std::shared_ptr<net::TcpStream> stream);
  void on_agent_message(AgentLink& link, const nlohmann::json& msg);
  void on_agent_gone(AgentLink& link);
  void on_ingest_closed(const relay::IngestResult& result);
  void maybe_finalize(const Uuid& session_id);
  void maintenance();
  std::shared_ptr<Session> find(const Uuid& session_id) const;
  std::shared_ptr<AgentLink> link_for(const std::string& scene_id, std::uint16_t device) const;
  void require_controller(const Session& s, const std::string& researcher) const;

  SceneRegistry scenes_;
  GatewayOptions options_;
  LeaseTable leases_;
  Broker broker_;
  EventStore events_;
  std::unique_ptr<relay::Relay> relay_;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::map<Uuid, std::shared_ptr<Session>> sessions_;
  std::map<std::pair<std::string, std::uint16_t>, std::shared_ptr<AgentLink>> agents_;

  std::unique_ptr<net::TcpListener> control_listener_;
  std::thread control_thread_;
  std::mutex conn_mu_;
  std::vector<std::thread> agent_threads_;
  std::vector<std::weak_ptr<net::TcpStream>> agent_streams_;
  std::thread maintenance_thread_;
  std::atomic<bool> stopping_{false};
  std::atomic<std::uint64_t> wire_seq_{0};
};

}  // namespace remcap::gateway
