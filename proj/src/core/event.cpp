// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/core/event.hpp"

#include <array>

#include "remcap/core/error.hpp"

namespace remcap {

std::string_view event_kind_name(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::Command: return "COMMAND";
    case EventKind::Inference: return "INFERENCE";
    case EventKind::Marker: return "MARKER";
    case EventKind::Lifecycle: return "LIFECYCLE";
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view name) noexcept {
  for (auto k : {EventKind::Command, EventKind::Inference, EventKind::Marker, EventKind::Lifecycle}) {
    if (event_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

nlohmann::json to_json(const EventRecord& e) {
  return {{"session_id", e.session_id.str()},
          {"seq", e.seq},
          {"kind", std::string(event_kind_name(e.kind))},
          {"frame_index", e.frame_index},
          {"ts_micros", e.ts_micros},
          {"payload", e.payload}};
}

EventRecord event_from_json(const nlohmann::json& j) {
  try {
    EventRecord e;
    auto id = Uuid::parse(j.at("session_id").get<std::string>());
    if (!id) throw Error(Errc::MalformedPayload, "session_id: not a UUID");
    e.session_id = *id;
    e.seq = j.at("seq").get<std::uint64_t>();
    auto kind = parse_event_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(Errc::MalformedPayload, "kind: unknown event kind");
    e.kind = *kind;
    e.frame_index = j.at("frame_index").get<std::uint64_t>();
    e.ts_micros = j.at("ts_micros").get<std::uint64_t>();
    e.payload = j.at("payload").get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::MalformedPayload, std::string("event: ") + ex.what());
  }
}

std::string canonical_json(std::string_view text) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(Errc::MalformedPayload, "payload: not valid JSON");
  }
  return j.dump();
}

}  // namespace remcap
