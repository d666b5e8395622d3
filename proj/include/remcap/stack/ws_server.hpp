// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include <nlohmann/json.hpp>

#include "remcap/gateway/gateway.hpp"
#include "remcap/net/tcp.hpp"

namespace remcap::stack {

/// Envelope used on the WebSocket channel.
nlohmann::json ws_message(const std::string& type, nlohmann::json payload);

/// Live feeds and the UI control path. Every text message is {type, payload};
/// frames travel as binary messages holding one EXFR record.
///
/// Client → server: subscribe_events {session_id, from_seq?},
/// subscribe_frames {session_id, annotated?}, unsubscribe {session_id, stream?},
/// command {session_id, researcher, kind, value, client_seq}, marker {session_id,
/// frame_index, text}, ping {}.
/// Server → client: hello, event, command_ack, marker_ack, subscribed,
/// unsubscribed, pong, error {error, message, request}.
class WsServer {
 public:
  struct Options {
    /// Binary frames waiting to be written per connection before the oldest is dropped.
    std::size_t max_pending_frames = 8;
  };

  explicit WsServer(gateway::Gateway& gateway);
  WsServer(gateway::Gateway& gateway, Options options);
  ~WsServer();
  WsServer(const WsServer&) = delete;
  WsServer& operator=(const WsServer&) = delete;

  std::uint16_t listen(const net::Endpoint& ep);
  void stop();
  std::size_t connections() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace remcap::stack
