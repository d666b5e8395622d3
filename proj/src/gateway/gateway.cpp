// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/gateway/gateway.hpp"

#include <set>

#include "remcap/core/error.hpp"

namespace remcap::gateway {

using nlohmann::json;
using std::chrono::steady_clock;

std::uint64_t SessionInfo::frame_count() const noexcept {
  std::uint64_t n = ingest ? ingest->stats.captured_hint : 0;
  if (agent_captured) n = std::max(n, *agent_captured);
  return n;
}

// One registered agent connection.
class Gateway::AgentLink {
 public:
  explicit AgentLink(std::shared_ptr<net::TcpStream> stream) : stream_(std::move(stream)) {}

  AgentInfo info;

  bool send(const json& msg) {
    std::lock_guard lock(write_mu_);
    return stream_->write_all(msg.dump() + "\n");
  }
  /// Blocks other senders so a reply can go out before anything else.
  std::unique_lock<std::mutex> hold_writes() { return std::unique_lock(write_mu_); }
  bool send_held(const json& msg) { return stream_->write_all(msg.dump() + "\n"); }
  std::optional<std::string> receive() { return stream_->read_line(); }

  void expect(const std::string& key) {
    std::lock_guard lock(mu_);
    pending_[key] = std::nullopt;
  }
  void resolve(const std::string& key, json msg) {
    std::lock_guard lock(mu_);
    auto it = pending_.find(key);
    if (it == pending_.end() || it->second) return;
    it->second = std::move(msg);
    cv_.notify_all();
  }
  /// nullopt on timeout or disconnect.
  std::optional<json> wait(const std::string& key, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return gone_ || pending_[key].has_value(); });
    auto v = std::move(pending_[key]);
    pending_.erase(key);
    return v;
  }
  void mark_gone() {
    std::lock_guard lock(mu_);
    gone_ = true;
    cv_.notify_all();
  }
  bool gone() const {
    std::lock_guard lock(mu_);
    return gone_;
  }
  void shutdown() { stream_->shutdown(); }

 private:
  std::shared_ptr<net::TcpStream> stream_;
  std::mutex write_mu_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, std::optional<json>> pending_;
  bool gone_ = false;
};

struct Gateway::Session {
  SessionInfo info;
  StatusMachine machine;
  bool relay_closed = false;
  bool agent_ended = false;
  bool finalizing = false;
  steady_clock::time_point relay_closed_at;

  void advance(SessionStatus to) {
    if (machine.advance(to)) info.state.status = to;
  }
};

Gateway::Gateway(SceneRegistry scenes, GatewayOptions options, Clock& lease_clock)
    : scenes_(std::move(scenes)),
      options_(std::move(options)),
      leases_(lease_clock),
      broker_(options_.subscription_capacity),
      events_(options_.data_root / "eventlog", broker_) {
  relay::RelayHooks hooks;
  hooks.event = [this](const Uuid& id, EventKind kind, std::uint64_t frame,
                       const std::string& payload) {
    try {
      events_.append(id, kind, frame, payload);
    } catch (const Error&) {
      // Session unknown to the log; nothing to attach the event to.
    }
  };
  hooks.closed = [this](const relay::IngestResult& r) { on_ingest_closed(r); };
  relay_ = std::make_unique<relay::Relay>(std::move(hooks), options_.relay);
  maintenance_thread_ = std::thread([this] { maintenance(); });
}

Gateway::~Gateway() { shutdown(); }

std::uint16_t Gateway::listen_relay(const net::Endpoint& ep) { return relay_->listen(ep); }

std::uint16_t Gateway::listen_control(const net::Endpoint& ep) {
  control_listener_ = std::make_unique<net::TcpListener>(ep);
  control_thread_ = std::thread([this] {
    while (auto stream = control_listener_->accept()) {
      if (stopping_.load()) break;
      auto shared = std::make_shared<net::TcpStream>(std::move(*stream));
      std::lock_guard lock(conn_mu_);
      agent_streams_.push_back(shared);
      agent_threads_.emplace_back([this, shared] { serve_agent(shared); });
    }
  });
  return control_listener_->port();
}

void Gateway::shutdown() {
  if (stopping_.exchange(true)) return;
  if (control_listener_) control_listener_->close();
  if (control_thread_.joinable()) control_thread_.join();
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(conn_mu_);
    for (auto& w : agent_streams_)
      if (auto s = w.lock()) s->shutdown();
    threads.swap(agent_threads_);
  }
  for (auto& t : threads)
    if (t.joinable()) t.join();
  relay_->stop();
  cv_.notify_all();
  if (maintenance_thread_.joinable()) maintenance_thread_.join();
  broker_.close_all();
}

// ---------------------------------------------------------------- scenes

json Gateway::scenes_json() const {
  json out = json::array();
  for (const auto& scene : scenes_.all()) {
    json j = to_json(scene);
    auto lease = leases_.current(scene.scene_id);
    j["lease"] = lease ? to_json(*lease) : json(nullptr);
    std::lock_guard lock(mu_);
    for (auto& d : j["devices"]) {
      const auto id = d["device_id"].get<std::uint16_t>();
      d["online"] = agents_.count({scene.scene_id, id}) != 0;
      d["session_id"] = nullptr;
      for (const auto& [sid, s] : sessions_) {
        if (s->info.state.scene_id == scene.scene_id && s->info.state.device_id == id &&
            s->info.state.status <= SessionStatus::Live) {
          d["session_id"] = sid.str();
        }
      }
    }
    out.push_back(std::move(j));
  }
  return out;
}

SceneLease Gateway::acquire_lease(const std::string& researcher, const std::string& scene_id,
                                  std::optional<std::uint32_t> ttl_seconds) {
  scenes_.at(scene_id);
  return leases_.acquire(researcher, scene_id, ttl_seconds.value_or(options_.default_lease_ttl));
}

void Gateway::release_lease(const std::string& scene_id, const std::string& researcher) {
  scenes_.at(scene_id);
  leases_.release(scene_id, researcher);
}

// ---------------------------------------------------------------- agents

std::shared_ptr<Gateway::AgentLink> Gateway::link_for(const std::string& scene_id,
                                                      std::uint16_t device) const {
  std::lock_guard lock(mu_);
  auto it = agents_.find({scene_id, device});
  return it == agents_.end() ? nullptr : it->second;
}

bool Gateway::device_online(const std::string& scene_id, std::uint16_t device_id) const {
  return link_for(scene_id, device_id) != nullptr;
}

bool Gateway::wait_for_device(const std::string& scene_id, std::uint16_t device_id,
                              std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, timeout, [&] { return agents_.count({scene_id, device_id}) != 0; });
}

void Gateway::serve_agent(std::shared_ptr<net::TcpStream> stream) {
  auto link = std::make_shared<AgentLink>(stream);
  auto first = link->receive();
  if (!first) return;
  auto reg = json::parse(*first, nullptr, false);
  auto reject = [&](Errc code, const std::string& why) {
    link->send({{"type", "error"}, {"error", errc_name(code)}, {"message", why}});
    link->shutdown();
  };
  if (reg.is_discarded() || reg.value("type", "") != "register") {
    return reject(Errc::MalformedPayload, "expected a register message");
  }
  try {
    auto& info = link->info;
    info.scene_id = reg.at("scene_id").get<std::string>();
    info.device_id = reg.at("device_id").get<std::uint16_t>();
    info.fps = reg.value("fps", std::uint8_t{30});
    auto preset = parse_preset(reg.value("resolution", "360p"));
    if (!preset) return reject(Errc::InvalidArgument, "unknown resolution");
    info.resolution = *preset;
    info.wheelbase = reg.value("wheelbase", 0.25);
    info.deterministic = reg.value("deterministic", false);
    info.capabilities = reg.value("capabilities", "");
  } catch (const json::exception& e) {
    return reject(Errc::MalformedPayload, e.what());
  }
  const auto key = std::make_pair(link->info.scene_id, link->info.device_id);
  if (!scenes_.contains(key.first)) return reject(Errc::UnknownScene, key.first);
  if (!scenes_.at(key.first).has_device(key.second)) {
    return reject(Errc::UnknownDevice, "device " + std::to_string(key.second));
  }
  std::shared_ptr<AgentLink> replaced;
  // Once visible in agents_, a start may be sent; "registered" must precede it.
  auto writes = link->hold_writes();
  {
    std::lock_guard lock(mu_);
    auto [it, inserted] = agents_.emplace(key, link);
    if (!inserted) {
      // A device that reconnects while idle replaces its stale link.
      bool active = false;
      for (const auto& [id, s] : sessions_) {
        active = active || (s->info.state.scene_id == key.first &&
                            s->info.state.device_id == key.second &&
                            s->info.state.status <= SessionStatus::Live);
      }
      if (active) {
        writes.unlock();
        return reject(Errc::DeviceBusy, "device " + std::to_string(key.second) +
                                            " is already registered");
      }
      replaced = std::exchange(it->second, link);
    }
  }
  if (replaced) {
    replaced->mark_gone();
    replaced->shutdown();
  }
  link->send_held({{"type", "registered"}});
  writes.unlock();
  cv_.notify_all();
  while (auto line = link->receive()) {
    auto msg = json::parse(*line, nullptr, false);
    if (msg.is_discarded() || !msg.is_object()) continue;
    try {
      on_agent_message(*link, msg);
    } catch (const std::exception&) {
      // A bad message from one agent must not take down its link.
    }
  }
  on_agent_gone(*link);
}

void Gateway::on_agent_message(AgentLink& link, const json& msg) {
  const auto type = msg.value("type", "");
  const auto sid_text = msg.value("session_id", "");
  const auto sid = Uuid::parse(sid_text);
  if (type == "started" && sid) {
    const auto& a = link.info;
    events_.append(*sid, EventKind::Lifecycle, 0,
                   json{{"event", "started"},
                        {"device_id", a.device_id},
                        {"fps", a.fps},
                        {"resolution", preset_name(a.resolution)},
                        {"wheelbase", a.wheelbase},
                        {"deterministic", a.deterministic}}
                       .dump());
    if (auto s = find(*sid)) {
      std::lock_guard lock(mu_);
      s->advance(SessionStatus::Live);
    }
    cv_.notify_all();
    link.resolve("start:" + sid_text, msg);
  } else if (type == "start_failed") {
    link.resolve("start:" + sid_text, msg);
  } else if (type == "ack" && sid) {
    const AppliedCommand applied = applied_from_json(msg.at("applied"));
    const auto seq = events_.append(*sid, EventKind::Command, applied.applied_frame_index,
                                    command_payload(applied.command).dump());
    if (!msg.value("scripted", false)) {
      json reply = msg;
      reply["event_seq"] = seq;
      link.resolve("ack:" + sid_text + ":" + std::to_string(applied.command.client_seq), reply);
    }
  } else if (type == "nack") {
    link.resolve("ack:" + sid_text + ":" + std::to_string(msg.value("client_seq", 0ull)), msg);
  } else if (type == "event" && sid) {
    auto kind = parse_event_kind(msg.value("kind", ""));
    if (kind) {
      events_.append(*sid, *kind, msg.value("frame_index", 0ull), msg.value("payload", "{}"));
    }
  } else if (type == "ended" && sid) {
    auto s = find(*sid);
    if (!s) return;
    {
      std::lock_guard lock(mu_);
      s->agent_ended = true;
      if (msg.contains("summary")) {
        s->info.agent_captured = msg["summary"].value("captured_frames", 0ull);
      }
    }
    maybe_finalize(*sid);
  } else if (type == "pong") {
    link.resolve("pong:" + std::to_string(msg.value("nonce", 0ull)), msg);
  }
}

void Gateway::on_agent_gone(AgentLink& link) {
  link.mark_gone();
  std::vector<Uuid> affected;
  {
    std::lock_guard lock(mu_);
    auto it = agents_.find({link.info.scene_id, link.info.device_id});
    if (it != agents_.end() && it->second.get() == &link) agents_.erase(it);
    for (auto& [id, s] : sessions_) {
      if (s->info.state.scene_id == link.info.scene_id &&
          s->info.state.device_id == link.info.device_id && !s->agent_ended) {
        s->agent_ended = true;
        affected.push_back(id);
      }
    }
  }
  cv_.notify_all();
  for (const auto& id : affected) maybe_finalize(id);
}

// ---------------------------------------------------------------- sessions

std::shared_ptr<Gateway::Session> Gateway::find(const Uuid& session_id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::vector<SessionState> Gateway::start_parallel_capture(
    const SceneLease& lease, const std::vector<std::uint16_t>& device_ids,
    const std::vector<ProcessorFactory>& processors) {
  leases_.validate(lease.scene_id, lease.holder);
  const auto& scene = scenes_.at(lease.scene_id);
  std::set<std::uint16_t> unique;
  for (auto d : device_ids) {
    if (!scene.has_device(d)) {
      throw Error(Errc::UnknownDevice, "device " + std::to_string(d) + " is not in scene " +
                                           scene.scene_id);
    }
    if (!unique.insert(d).second) {
      throw Error(Errc::InvalidArgument, "device " + std::to_string(d) + " listed twice");
    }
  }
  if (device_ids.empty()) throw Error(Errc::InvalidArgument, "device_ids: empty");

  struct Pending {
    std::shared_ptr<Session> session;
    std::shared_ptr<AgentLink> link;
  };
  std::vector<Pending> pending;
  {
    std::lock_guard lock(mu_);
    for (auto d : device_ids) {
      auto it = agents_.find({scene.scene_id, d});
      if (it == agents_.end()) {
        throw Error(Errc::DeviceOffline, "device " + std::to_string(d) + " has no agent");
      }
      for (const auto& [_, s] : sessions_) {
        if (s->info.state.scene_id == scene.scene_id && s->info.state.device_id == d &&
            s->info.state.status <= SessionStatus::Live) {
          throw Error(Errc::DeviceBusy, "device " + std::to_string(d) + " is in session " +
                                            s->info.state.session_id.str());
        }
      }
    }
    for (auto d : device_ids) {
      auto link = agents_.at({scene.scene_id, d});
      auto s = std::make_shared<Session>();
      s->info.state.session_id = Uuid::random();
      s->info.state.scene_id = scene.scene_id;
      s->info.state.device_id = d;
      s->info.researcher = lease.holder;
      s->info.agent = link->info;
      s->info.container_dir =
          ContainerLayout::for_session(options_.data_root, s->info.state.session_id).root;
      sessions_.emplace(s->info.state.session_id, s);
      pending.push_back({s, link});
    }
  }

  for (auto& p : pending) {
    const auto& id = p.session->info.state.session_id;
    events_.create(id);
    relay_->expect_session(id, ContainerLayout{p.session->info.container_dir}.segments_dir(),
                           p.link->info.fps);
    // Attached before the agent starts so no frame bypasses them.
    for (const auto& make : processors) relay_->attach_processor(id, make());
    const auto start_ts = wall_micros();
    {
      std::lock_guard lock(mu_);
      p.session->info.start_ts_micros = start_ts;
    }
    p.link->expect("start:" + id.str());
    p.link->send({{"type", "start"}, {"session_id", id.str()}, {"start_ts_micros", start_ts}});
  }

  std::optional<Error> failure;
  std::vector<SessionState> out;
  for (auto& p : pending) {
    const auto id = p.session->info.state.session_id;
    auto reply = p.link->wait("start:" + id.str(), options_.agent_timeout);
    if (reply && reply->value("type", "") == "started") {
      out.push_back(session(id));
      continue;
    }
    std::string why;
    Errc code = Errc::AgentTimeout;
    if (reply) {
      why = reply->value("message", "start failed");
      code = why.find("busy") != std::string::npos ? Errc::DeviceBusy : Errc::RelayDisconnected;
    } else if (p.link->gone()) {
      code = Errc::DeviceOffline;
      why = "agent disconnected during start";
    } else {
      why = "no reply to start within " + std::to_string(options_.agent_timeout.count()) + " ms";
    }
    events_.append(id, EventKind::Lifecycle, 0,
                   json{{"event", "start_failed"}, {"reason", why}}.dump());
    {
      std::lock_guard lock(mu_);
      p.session->advance(SessionStatus::Stopping);
      p.session->finalizing = true;
      p.session->info.finalized = true;
    }
    if (!failure) failure = Error(code, "device " + std::to_string(p.session->info.state.device_id) + ": " + why);
  }
  cv_.notify_all();
  if (failure) throw *failure;
  return out;
}

void Gateway::require_controller(const Session& s, const std::string& researcher) const {
  leases_.validate(s.info.state.scene_id, researcher);
}

CommandResult Gateway::submit_command(const Uuid& session_id, const std::string& researcher,
                                      const ControlCommand& command) {
  auto s = find(session_id);
  if (!s) throw Error(Errc::UnknownSession, "session " + session_id.str());
  std::string scene;
  std::uint16_t device = 0;
  {
    std::lock_guard lock(mu_);
    if (s->info.state.status != SessionStatus::Live) {
      throw Error(Errc::SessionNotLive, "session " + session_id.str() + " is " +
                                            std::string(session_status_name(s->info.state.status)));
    }
    scene = s->info.state.scene_id;
    device = s->info.state.device_id;
  }
  require_controller(*s, researcher);
  auto link = link_for(scene, device);
  if (!link) throw Error(Errc::SessionNotLive, "agent for session " + session_id.str() + " is gone");

  const std::uint64_t wire = ++wire_seq_;
  const std::string key = "ack:" + session_id.str() + ":" + std::to_string(wire);
  json cmd = command_payload(command);
  cmd["client_seq"] = wire;
  cmd["issued_ts_micros"] = command.issued_ts_micros ? command.issued_ts_micros : wall_micros();
  link->expect(key);
  const auto t0 = steady_clock::now();
  link->send({{"type", "command"}, {"session_id", session_id.str()}, {"command", cmd}});
  auto reply = link->wait(key, options_.agent_timeout);
  const auto rtt = std::chrono::duration_cast<std::chrono::microseconds>(steady_clock::now() - t0);
  if (!reply) {
    throw Error(Errc::AgentTimeout, "no ack within " +
                                        std::to_string(options_.agent_timeout.count()) + " ms");
  }
  if (reply->value("type", "") == "nack") {
    throw Error(Errc::SessionNotLive, reply->value("message", "command rejected"));
  }
  CommandResult result;
  result.applied = applied_from_json(reply->at("applied"));
  result.applied.command.client_seq = command.client_seq;
  result.round_trip_micros = static_cast<std::uint64_t>(rtt.count());
  result.event_seq = reply->value("event_seq", 0ull);
  return result;
}

SessionState Gateway::stop_session(const Uuid& session_id, const std::string& researcher) {
  auto s = find(session_id);
  if (!s) throw Error(Errc::UnknownSession, "session " + session_id.str());
  std::string scene;
  std::uint16_t device = 0;
  {
    std::lock_guard lock(mu_);
    if (s->info.state.status != SessionStatus::Live) {
      throw Error(Errc::SessionNotLive, "session " + session_id.str() + " is " +
                                            std::string(session_status_name(s->info.state.status)));
    }
    scene = s->info.state.scene_id;
    device = s->info.state.device_id;
    if (researcher != s->info.researcher) require_controller(*s, researcher);
  }
  if (auto link = link_for(scene, device)) {
    link->send({{"type", "stop"}, {"session_id", session_id.str()}});
  }
  std::unique_lock lock(mu_);
  const auto limit = options_.agent_timeout * 2 + std::chrono::seconds(2);
  if (!cv_.wait_for(lock, limit, [&] { return s->info.finalized || stopping_.load(); })) {
    throw Error(Errc::AgentTimeout, "session " + session_id.str() + " did not stop in time");
  }
  return s->info.state;
}

void Gateway::on_ingest_closed(const relay::IngestResult& result) {
  const auto id = result.stats.session_id;
  auto s = find(id);
  if (!s) return;
  if (!result.clean) {
    const auto hint = result.stats.captured_hint;
    json payload{{"event", "incomplete"},
                 {"error", result.error ? std::string(errc_name(*result.error)) : "unknown"},
                 {"detail", result.detail}};
    events_.append(id, EventKind::Lifecycle, hint ? hint - 1 : 0, payload.dump());
  }
  {
    std::lock_guard lock(mu_);
    s->info.ingest = result;
    s->advance(SessionStatus::Stopping);
    s->relay_closed = true;
    s->relay_closed_at = steady_clock::now();
  }
  cv_.notify_all();
  maybe_finalize(id);
}

void Gateway::maybe_finalize(const Uuid& session_id) {
  auto s = find(session_id);
  if (!s) return;
  std::uint64_t frame_count = 0;
  std::uint64_t delivered = 0;
  {
    std::lock_guard lock(mu_);
    if (!s->relay_closed || !s->agent_ended || s->finalizing) return;
    s->finalizing = true;
    frame_count = s->info.frame_count();
    delivered = s->info.ingest ? s->info.ingest->stats.delivered : 0;
  }
  events_.append(session_id, EventKind::Lifecycle, frame_count ? frame_count - 1 : 0,
                 json{{"event", "stopped"}, {"delivered", delivered}, {"frame_count", frame_count}}
                     .dump());
  {
    std::lock_guard lock(mu_);
    s->info.finalized = true;
  }
  cv_.notify_all();
  // Published last: the packer may run before this function returns.
  broker_.publish(kPackingChannel, json{{"session_id", session_id.str()}}.dump());
}

void Gateway::maintenance() {
  while (!stopping_.load()) {
    std::vector<Uuid> overdue;
    {
      std::unique_lock lock(mu_);
      cv_.wait_for(lock, std::chrono::milliseconds(100), [&] { return stopping_.load(); });
      const auto now = steady_clock::now();
      for (auto& [id, s] : sessions_) {
        if (s->relay_closed && !s->agent_ended &&
            now - s->relay_closed_at > options_.agent_timeout) {
          s->agent_ended = true;
          overdue.push_back(id);
        }
      }
    }
    for (const auto& id : overdue) maybe_finalize(id);
  }
}

SessionState Gateway::session(const Uuid& session_id) const {
  return session_info(session_id).state;
}

SessionInfo Gateway::session_info(const Uuid& session_id) const {
  auto s = find(session_id);
  if (!s) throw Error(Errc::UnknownSession, "session " + session_id.str());
  std::lock_guard lock(mu_);
  return s->info;
}

std::vector<SessionState> Gateway::sessions() const {
  std::lock_guard lock(mu_);
  std::vector<SessionState> out;
  for (const auto& [_, s] : sessions_) out.push_back(s->info.state);
  return out;
}

bool Gateway::wait_for_status(const Uuid& session_id, SessionStatus at_least,
                              std::chrono::milliseconds timeout) const {
  auto s = find(session_id);
  if (!s) throw Error(Errc::UnknownSession, "session " + session_id.str());
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, timeout, [&] { return s->info.state.status >= at_least; });
}

void Gateway::mark_packed(const Uuid& session_id, const SessionManifest& manifest) {
  auto s = find(session_id);
  if (!s) throw Error(Errc::UnknownSession, "session " + session_id.str());
  {
    std::lock_guard lock(mu_);
    if (s->info.state.status == SessionStatus::Packed) return;
    if (s->info.state.status != SessionStatus::Stopping) {
      throw Error(Errc::SessionNotStopped, "session " + session_id.str() + " is " +
                                               std::string(session_status_name(s->info.state.status)));
    }
    s->info.state.manifest = manifest;
    s->advance(SessionStatus::Packed);
  }
  events_.append(session_id, EventKind::Lifecycle, manifest.frame_count ? manifest.frame_count - 1 : 0,
                 json{{"event", "packed"},
                      {"frame_count", manifest.frame_count},
                      {"segments", manifest.segments.size()}}
                     .dump());
  cv_.notify_all();
}

// ---------------------------------------------------------------- events

std::uint64_t Gateway::append_event(const Uuid& session_id, EventKind kind,
                                    std::uint64_t frame_index, const std::string& payload_json) {
  return events_.append(session_id, kind, frame_index, payload_json);
}

std::uint64_t Gateway::add_marker(const Uuid& session_id, std::uint64_t frame_index,
                                  const std::string& text) {
  return events_.append(session_id, EventKind::Marker, frame_index, json{{"text", text}}.dump());
}

std::vector<EventRecord> Gateway::read_events(const Uuid& session_id,
                                              std::uint64_t from_seq) const {
  return events_.read(session_id, from_seq);
}

}  // namespace remcap::gateway
