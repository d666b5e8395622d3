// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "remcap/core/event.hpp"

namespace remcap {

/// Milliseconds from session start at which `frame_index` is shown:
/// floor(frame_index * 1000 / fps). Throws OutOfRange at or beyond 99 hours.
std::uint64_t frame_millis(std::uint64_t frame_index, std::uint8_t fps);

/// Smallest frame index whose frame_millis equals `millis` (valid for fps <= 1000).
std::uint64_t frame_at_millis(std::uint64_t millis, std::uint8_t fps);

std::string format_srt_time(std::uint64_t millis);
/// "HH:MM:SS,mmm" for the frame; see frame_millis.
std::string srt_timestamp(std::uint64_t frame_index, std::uint8_t fps);

/// One cue per event, numbered from 1. A cue ends at the earliest of: the next
/// strictly later event start, start + 1 s, and the end of the session.
/// Events must be sorted by (frame_index, seq); throws UnsortedEvents.
std::string build_srt(std::span<const EventRecord> events, std::uint8_t fps,
                      std::uint64_t frame_count);

struct SrtCue {
  std::uint64_t index = 0;
  std::uint64_t start_ms = 0;
  std::uint64_t end_ms = 0;
  std::string text;

  bool covers(std::uint64_t millis) const noexcept {
    return start_ms <= millis && millis < end_ms;
  }
  friend bool operator==(const SrtCue&, const SrtCue&) = default;
};

/// Parses SubRip text as written by build_srt. Throws PayloadMismatch on
/// malformed cues.
std::vector<SrtCue> parse_srt(std::string_view text);

}  // namespace remcap
