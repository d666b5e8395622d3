// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/agent/device_agent.hpp"

#include <cstdio>

#include "remcap/core/error.hpp"
#include "remcap/core/session_header.hpp"

namespace remcap::agent {

using nlohmann::json;

void AgentConfig::validate() const {
  if (fps < 1 || fps > 120) throw Error(Errc::InvalidArgument, "fps: outside 1..120");
  if (!(wheelbase > 0.0)) throw Error(Errc::InvalidArgument, "wheelbase: must be > 0");
  if (scene_id.empty()) throw Error(Errc::InvalidArgument, "scene: must not be empty");
}

namespace {

class RelaySender final : public FrameSender {
 public:
  explicit RelaySender(net::TcpStream stream) : stream_(std::move(stream)) {}
  bool send(const Bytes& encoded) override { return stream_.write_all(encoded); }
  net::TcpStream& stream() { return stream_; }

 private:
  net::TcpStream stream_;
};

}  // namespace

class DeviceAgent::Session final : public CaptureObserver {
 public:
  Session(DeviceAgent& owner, CaptureConfig cfg, net::TcpStream relay)
      : owner_(owner), sender_(std::move(relay)), loop_(std::move(cfg), clock_, sender_, this) {}

  void on_applied(const AppliedCommand& applied, bool scripted) override {
    json msg{{"type", "ack"},
             {"session_id", loop_.config().session_id.str()},
             {"scripted", scripted},
             {"applied", to_json(applied)}};
    owner_.send(msg);
  }

  void on_frame(std::uint64_t frame_index, bool delivered) override {
    last_frame_ = frame_index;
    (void)delivered;
  }

  void start() {
    thread_ = std::thread([this] {
      auto summary = loop_.run();
      sender_.stream().shutdown();
      sender_.stream().close();
      const auto id = loop_.config().session_id.str();
      if (summary.relay_disconnected) {
        owner_.send({{"type", "event"},
                     {"session_id", id},
                     {"kind", "LIFECYCLE"},
                     {"frame_index", last_frame_},
                     {"payload", json{{"event", "relay_disconnected"}}.dump()}});
      }
      owner_.send({{"type", "ended"}, {"session_id", id}, {"summary", to_json(summary)}});
      bool stop_serving = false;
      {
        std::lock_guard lock(owner_.mu_);
        owner_.last_summary_ = summary;
        ++owner_.sessions_ended_;
        stop_serving = owner_.once_;
      }
      owner_.cv_.notify_all();
      done_ = true;
      // Wakes serve() so a one-shot agent returns without another message.
      if (stop_serving) owner_.control_->shutdown();
    });
  }

  void join() {
    if (thread_.joinable()) thread_.join();
  }

  CaptureLoop& loop() { return loop_; }
  bool done() const { return done_.load(); }

 private:
  DeviceAgent& owner_;
  SteadyClock clock_;
  RelaySender sender_;
  CaptureLoop loop_;
  std::thread thread_;
  std::uint64_t last_frame_ = 0;
  std::atomic<bool> done_{false};
};

DeviceAgent::DeviceAgent(AgentConfig config) : config_(std::move(config)) { config_.validate(); }

DeviceAgent::~DeviceAgent() {
  shutdown();
  std::unique_ptr<Session> s;
  {
    std::lock_guard lock(mu_);
    s = std::move(session_);
  }
  if (s) {
    s->loop().request_stop();
    s->join();
  }
}

bool DeviceAgent::send(const json& msg) { return control_ && control_->send(msg.dump()); }

void DeviceAgent::connect() {
  try {
    control_ = std::make_unique<net::LineChannel>(net::TcpStream::connect(config_.gateway));
  } catch (const Error& e) {
    throw Error(Errc::GatewayUnreachable, e.detail());
  }
  send({{"type", "register"},
        {"scene_id", config_.scene_id},
        {"device_id", config_.device_id},
        {"fps", config_.fps},
        {"resolution", std::string(preset_name(config_.preset))},
        {"wheelbase", config_.wheelbase},
        {"deterministic", config_.deterministic_clock},
        {"capabilities", config_.capabilities}});
  auto reply = control_->receive();
  if (!reply) throw Error(Errc::GatewayUnreachable, "gateway closed during registration");
  auto j = json::parse(*reply, nullptr, false);
  if (j.is_discarded() || j.value("type", "") != "registered") {
    std::string why = j.is_discarded() ? "malformed reply" : j.value("message", j.dump());
    throw Error(Errc::GatewayUnreachable, "registration rejected: " + why);
  }
}

void DeviceAgent::serve(bool once) {
  once_ = once;
  if (!control_) connect();
  while (!shutting_down_.load()) {
    auto line = control_->receive();
    if (!line) break;
    auto msg = json::parse(*line, nullptr, false);
    if (msg.is_discarded() || !msg.is_object()) continue;
    handle(msg);
    std::lock_guard lock(mu_);
    if (once_ && sessions_ended_ > 0) break;
  }
  finish_session();
}

void DeviceAgent::handle(const json& msg) {
  const auto type = msg.value("type", "");
  if (type == "start") {
    start_session(msg);
  } else if (type == "command") {
    const auto client_seq = msg["command"].value("client_seq", std::uint64_t{0});
    try {
      ControlCommand cmd = command_from_payload(msg.at("command"));
      cmd.client_seq = client_seq;
      cmd.issued_ts_micros = msg["command"].value("issued_ts_micros", std::uint64_t{0});
      std::lock_guard lock(mu_);
      if (!session_ || session_->done() ||
          session_->loop().config().session_id.str() != msg.value("session_id", "")) {
        throw Error(Errc::SessionNotRunning, "no running session " + msg.value("session_id", ""));
      }
      session_->loop().submit(cmd);
    } catch (const Error& e) {
      send({{"type", "nack"},
            {"session_id", msg.value("session_id", "")},
            {"client_seq", client_seq},
            {"error", std::string(errc_name(e.code()))},
            {"message", e.detail()}});
    }
  } else if (type == "stop") {
    std::lock_guard lock(mu_);
    if (session_) session_->loop().request_stop();
  } else if (type == "ping") {
    send({{"type", "pong"}, {"nonce", msg.value("nonce", std::uint64_t{0})}});
  }
}

void DeviceAgent::start_session(const json& msg) {
  const auto id_text = msg.value("session_id", "");
  auto id = Uuid::parse(id_text);
  auto fail = [&](const std::string& why) {
    send({{"type", "start_failed"}, {"session_id", id_text}, {"message", why}});
  };
  if (!id) return fail("bad session id");
  {
    std::lock_guard lock(mu_);
    if (session_ && !session_->done()) return fail("device busy");
  }
  finish_session();

  CaptureConfig cfg;
  cfg.session_id = *id;
  cfg.device_id = config_.device_id;
  cfg.fps = config_.fps;
  cfg.preset = config_.preset;
  cfg.wheelbase = config_.wheelbase;
  cfg.deterministic_clock = config_.deterministic_clock;
  cfg.start_ts_micros = msg.value("start_ts_micros", wall_micros());
  cfg.send_budget_bytes_per_sec = config_.send_budget_bytes_per_sec;
  cfg.max_frames = config_.max_frames;
  cfg.encoding = config_.encoding;
  cfg.script = config_.script;

  net::TcpStream relay;
  try {
    relay = net::TcpStream::connect(config_.relay);
  } catch (const Error& e) {
    return fail("relay unreachable: " + e.detail());
  }
  SessionHeader header{*id, config_.device_id, config_.fps, config_.preset,
                       static_cast<std::uint8_t>(config_.deterministic_clock ? kFlagDeterministic : 0)};
  if (!relay.write_all(encode_session_header(header))) return fail("relay closed");

  auto session = std::make_unique<Session>(*this, std::move(cfg), std::move(relay));
  auto* raw = session.get();
  {
    std::lock_guard lock(mu_);
    session_ = std::move(session);
  }
  send({{"type", "started"}, {"session_id", id_text}});
  raw->start();
}

void DeviceAgent::finish_session() {
  std::unique_ptr<Session> s;
  {
    std::lock_guard lock(mu_);
    if (!session_) return;
    s = std::move(session_);
  }
  s->loop().request_stop();
  s->join();
}

void DeviceAgent::shutdown() {
  shutting_down_ = true;
  {
    std::lock_guard lock(mu_);
    if (session_) session_->loop().request_stop();
  }
  cv_.notify_all();
  if (control_) control_->shutdown();
}

std::optional<SessionSummary> DeviceAgent::last_summary() const {
  std::lock_guard lock(mu_);
  return last_summary_;
}

SessionSummary run_capture(const AgentConfig& config) {
  DeviceAgent agent(config);
  agent.connect();
  agent.serve(true);
  auto summary = agent.last_summary();
  if (!summary) throw Error(Errc::GatewayUnreachable, "gateway closed before the session ended");
  if (summary->relay_disconnected) {
    throw Error(Errc::RelayDisconnected, "relay closed after " +
                                             std::to_string(summary->delivered_frames) +
                                             " delivered frames");
  }
  return *summary;
}

}  // namespace remcap::agent
