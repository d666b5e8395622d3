// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/stack/http_api.hpp"

#include <httplib.h>

#include <thread>

#include "remcap/core/bytes.hpp"
#include "remcap/packer/packer.hpp"

namespace remcap::stack {

using nlohmann::json;

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::UnknownScene:
    case Errc::UnknownSession:
    case Errc::UnknownDevice:
    case Errc::FrameOutOfRange:
    case Errc::NotAContainer: return 404;
    case Errc::LeaseInvalid: return 403;
    case Errc::SceneBusy:
    case Errc::DeviceBusy:
    case Errc::DeviceOffline:
    case Errc::SessionNotLive:
    case Errc::SessionNotStopped:
    case Errc::SessionNotRunning: return 409;
    case Errc::MalformedPayload:
    case Errc::InvalidArgument:
    case Errc::OutOfRange:
    case Errc::BoxOutOfBounds: return 400;
    case Errc::AgentTimeout: return 504;
    case Errc::GatewayUnreachable:
    case Errc::RelayDisconnected:
    case Errc::StackUnreachable: return 502;
    default: return 500;
  }
}

json error_body(const Error& e) {
  json j{{"error", errc_name(e.code())}, {"message", e.detail()}};
  if (auto* busy = dynamic_cast<const gateway::SceneBusyError*>(&e)) {
    j["holder"] = busy->current().holder;
    j["expires_at"] = busy->current().expires_at_micros();
  }
  return j;
}

Bytes encode_replay_item(const FrameRecord& frame, const json& cues) {
  Bytes out = encode_frame_record(frame);
  const std::string text = cues.dump();
  le::put(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  return out;
}

DecodedReplayItem decode_replay_item(ByteView bytes) {
  auto [frame, used] = decode_frame_prefix(bytes);
  if (bytes.size() < used + 4) throw Error(Errc::TruncatedRecord, "replay item: no cue length");
  const auto len = le::load<std::uint32_t>(bytes.data() + used);
  if (bytes.size() < used + 4 + len) throw Error(Errc::TruncatedRecord, "replay item: cues cut");
  const std::string text(reinterpret_cast<const char*>(bytes.data() + used + 4), len);
  return {std::move(frame), json::parse(text), used + 4 + len};
}

namespace {

json cue_json(const SrtCue& c) {
  return {{"index", c.index}, {"start_ms", c.start_ms}, {"end_ms", c.end_ms}, {"text", c.text}};
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(Errc::MalformedPayload, "request body must be a JSON object");
  }
  return j;
}

template <typename T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw Error(Errc::MalformedPayload, std::string("missing field ") + name);
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::MalformedPayload, std::string("field ") + name + " has the wrong type");
  }
}

Uuid session_param(const httplib::Request& req) {
  auto id = Uuid::parse(req.path_params.at("id"));
  if (!id) throw Error(Errc::UnknownSession, "not a session id: " + req.path_params.at("id"));
  return *id;
}

std::uint64_t query_u64(const httplib::Request& req, const char* name, std::uint64_t fallback) {
  if (!req.has_param(name)) return fallback;
  try {
    return std::stoull(req.get_param_value(name));
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, std::string("query ") + name + " is not a number");
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

struct HttpApi::Impl {
  gateway::Gateway& gw;
  const inference::ProcessorRegistry& processors;
  httplib::Server server;
  std::thread thread;

  Impl(gateway::Gateway& g, const inference::ProcessorRegistry& p) : gw(g), processors(p) {
    server.set_tcp_nodelay(true);
    auto wrap = [](auto handler) {
      return [handler](const httplib::Request& req, httplib::Response& res) {
        try {
          handler(req, res);
        } catch (const Error& e) {
          send_json(res, http_status(e.code()), error_body(e));
        } catch (const std::exception& e) {
          send_json(res, 500, json{{"error", "Internal"}, {"message", e.what()}});
        }
      };
    };

    server.Get("/ping", wrap([](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, json{{"ts_micros", wall_micros()}});
    }));

    server.Get("/scenes", wrap([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, gw.scenes_json());
    }));

    server.Post("/leases", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      std::optional<std::uint32_t> ttl;
      if (body.contains("ttl_seconds")) ttl = field<std::uint32_t>(body, "ttl_seconds");
      auto lease = gw.acquire_lease(field<std::string>(body, "researcher"),
                                    field<std::string>(body, "scene_id"), ttl);
      auto j = to_json(lease);
      j["expires_at"] = lease.expires_at_micros();
      send_json(res, 201, j);
    }));

    server.Delete("/leases/:scene", wrap([this](const httplib::Request& req, httplib::Response& res) {
      std::string researcher = req.get_param_value("researcher");
      if (researcher.empty()) researcher = parse_body(req).value("researcher", "");
      gw.release_lease(req.path_params.at("scene"), researcher);
      res.status = 204;
    }));

    server.Get("/sessions", wrap([this](const httplib::Request&, httplib::Response& res) {
      json arr = json::array();
      for (const auto& s : gw.sessions()) arr.push_back(to_json(s));
      send_json(res, 200, arr);
    }));

    server.Post("/sessions", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto researcher = field<std::string>(body, "researcher");
      const auto scene = field<std::string>(body, "scene_id");
      std::vector<std::uint16_t> devices;
      if (body.contains("device_ids")) {
        devices = field<std::vector<std::uint16_t>>(body, "device_ids");
      } else {
        devices.push_back(field<std::uint16_t>(body, "device_id"));
      }
      std::vector<gateway::Gateway::ProcessorFactory> factories;
      if (body.contains("processors")) {
        for (const auto& name : field<std::vector<std::string>>(body, "processors")) {
          if (!processors.create(name)) throw Error(Errc::InvalidArgument, "unknown processor " + name);
          factories.push_back([this, name] { return processors.create(name); });
        }
      }
      auto lease = gw.leases().validate(scene, researcher);
      json arr = json::array();
      for (const auto& s : gw.start_parallel_capture(lease, devices, factories)) {
        arr.push_back(to_json(s));
      }
      send_json(res, 201, json{{"sessions", arr}});
    }));

    server.Get("/sessions/:id", wrap([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, to_json(gw.session(session_param(req))));
    }));

    server.Post("/sessions/:id/commands",
                wrap([this](const httplib::Request& req, httplib::Response& res) {
                  const auto body = parse_body(req);
                  ControlCommand cmd = command_from_payload(body);
                  cmd.client_seq = body.value("client_seq", std::uint64_t{0});
                  cmd.issued_ts_micros = body.value("issued_ts_micros", std::uint64_t{0});
                  auto r = gw.submit_command(session_param(req), field<std::string>(body, "researcher"),
                                             cmd);
                  auto j = to_json(r.applied);
                  j["round_trip_micros"] = r.round_trip_micros;
                  j["event_seq"] = r.event_seq;
                  send_json(res, 200, j);
                }));

    server.Post("/sessions/:id/markers",
                wrap([this](const httplib::Request& req, httplib::Response& res) {
                  const auto body = parse_body(req);
                  const auto seq = gw.add_marker(session_param(req),
                                                 field<std::uint64_t>(body, "frame_index"),
                                                 body.value("text", ""));
                  send_json(res, 201, json{{"seq", seq}});
                }));

    server.Get("/sessions/:id/events",
               wrap([this](const httplib::Request& req, httplib::Response& res) {
                 json arr = json::array();
                 for (const auto& e : gw.read_events(session_param(req), query_u64(req, "from", 1)))
                   arr.push_back(to_json(e));
                 send_json(res, 200, arr);
               }));

    server.Post("/sessions/:id/stop", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      send_json(res, 200, to_json(gw.stop_session(session_param(req),
                                                  field<std::string>(body, "researcher"))));
    }));

    server.Get("/sessions/:id/stats", wrap([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, relay::to_json(gw.relay().stats(session_param(req))));
    }));

    server.Post("/sessions/:id/processors",
                wrap([this](const httplib::Request& req, httplib::Response& res) {
                  const auto body = parse_body(req);
                  const auto id = session_param(req);
                  const auto name = field<std::string>(body, "name");
                  if (gw.session(id).status != gateway::SessionStatus::Live) {
                    throw Error(Errc::SessionNotLive, "session " + id.str() + " is not LIVE");
                  }
                  auto proc = processors.create(name);
                  if (!proc) throw Error(Errc::InvalidArgument, "unknown processor " + name);
                  gw.relay().attach_processor(id, proc);
                  send_json(res, 201, json{{"processors", gw.relay().processors(id)}});
                }));

    server.Get("/sessions/:id/container",
               wrap([this](const httplib::Request& req, httplib::Response& res) {
                 const auto info = gw.session_info(session_param(req));
                 if (!info.state.manifest) {
                   throw Error(Errc::SessionNotStopped, "session is not packed yet");
                 }
                 json body = to_json(*info.state.manifest);
                 if (req.get_param_value("verify") == "1") {
                   body = json{{"manifest", body},
                               {"verification",
                                packer::to_json(packer::verify_container(info.container_dir))}};
                 }
                 send_json(res, 200, body);
               }));

    server.Get("/sessions/:id/frames",
               wrap([this](const httplib::Request& req, httplib::Response& res) {
                 const auto info = gw.session_info(session_param(req));
                 if (!info.state.manifest) {
                   throw Error(Errc::SessionNotStopped, "session is not packed yet");
                 }
                 const auto limit = query_u64(req, "limit", 30);
                 Bytes out;
                 for (auto& item : packer::replay(info.container_dir, query_u64(req, "from", 0),
                                                  limit)) {
                   json cues = json::array();
                   for (const auto& c : item.cues) cues.push_back(cue_json(c));
                   Bytes one = encode_replay_item(item.frame, cues);
                   out.insert(out.end(), one.begin(), one.end());
                 }
                 res.status = 200;
                 res.set_content(std::string(out.begin(), out.end()), "application/octet-stream");
               }));
  }
};

HttpApi::HttpApi(gateway::Gateway& gateway, const inference::ProcessorRegistry& processors)
    : impl_(std::make_unique<Impl>(gateway, processors)) {}

HttpApi::~HttpApi() { stop(); }

std::uint16_t HttpApi::listen(const net::Endpoint& ep) {
  int port = ep.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(ep.host);
  } else if (!impl_->server.bind_to_port(ep.host, port)) {
    port = -1;
  }
  if (port <= 0) throw Error(Errc::IoError, "http: cannot bind " + ep.str());
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return static_cast<std::uint16_t>(port);
}

void HttpApi::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace remcap::stack
