// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "remcap/core/error.hpp"
#include "remcap/gateway/gateway.hpp"
#include "remcap/inference/processor.hpp"
#include "remcap/net/tcp.hpp"

namespace remcap::stack {

/// HTTP status for each error code.
int http_status(Errc code) noexcept;
/// {"error": name, "message": detail} plus holder details for SceneBusy.
nlohmann::json error_body(const Error& e);

/// One replay item on the wire: EXFR record ∥ u32 LE cue-JSON length ∥ cue JSON.
Bytes encode_replay_item(const FrameRecord& frame, const nlohmann::json& cues);
struct DecodedReplayItem {
  FrameRecord frame;
  nlohmann::json cues;
  std::size_t consumed = 0;
};
DecodedReplayItem decode_replay_item(ByteView bytes);

/// Request/response API over HTTP.
class HttpApi {
 public:
  HttpApi(gateway::Gateway& gateway, const inference::ProcessorRegistry& processors);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  /// Starts serving on a background thread. Port 0 picks one.
  std::uint16_t listen(const net::Endpoint& ep);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace remcap::stack
