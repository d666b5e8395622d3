// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "remcap/core/uuid.hpp"

namespace remcap {

enum class EventKind : std::uint8_t { Command, Inference, Marker, Lifecycle };

std::string_view event_kind_name(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view name) noexcept;

struct EventRecord {
  Uuid session_id;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Lifecycle;
  std::uint64_t frame_index = 0;
  std::uint64_t ts_micros = 0;
  std::string payload;  // compact JSON text

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

nlohmann::json to_json(const EventRecord& event);
EventRecord event_from_json(const nlohmann::json& j);

/// Parses `text` as JSON and re-serializes it compactly with sorted keys.
/// Throws MalformedPayload.
std::string canonical_json(std::string_view text);

}  // namespace remcap
