// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/core/srt.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "remcap/core/error.hpp"

namespace remcap {

namespace {

constexpr std::uint64_t kMaxHours = 99;
constexpr std::uint64_t kSecondsPerHour = 3600;

bool event_before(const EventRecord& a, const EventRecord& b) {
  return a.frame_index != b.frame_index ? a.frame_index < b.frame_index : a.seq < b.seq;
}

std::string single_line(const std::string& payload) {
  if (payload.find_first_of("\r\n") == std::string::npos) return payload;
  return canonical_json(payload);
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_time(std::string_view s, std::uint64_t& millis) {
  // HH:MM:SS,mmm
  if (s.size() != 12 || s[2] != ':' || s[5] != ':' || s[8] != ',') return false;
  std::uint64_t h, m, sec, ms;
  if (!parse_u64(s.substr(0, 2), h) || !parse_u64(s.substr(3, 2), m) ||
      !parse_u64(s.substr(6, 2), sec) || !parse_u64(s.substr(9, 3), ms)) {
    return false;
  }
  if (m >= 60 || sec >= 60) return false;
  millis = ((h * 60 + m) * 60 + sec) * 1000 + ms;
  return true;
}

}  // namespace

std::uint64_t frame_millis(std::uint64_t frame_index, std::uint8_t fps) {
  if (fps == 0) throw Error(Errc::InvalidArgument, "fps: must be >= 1");
  if (frame_index / fps >= kMaxHours * kSecondsPerHour) {
    throw Error(Errc::OutOfRange, "frame_index: " + std::to_string(frame_index) + " at " +
                                      std::to_string(fps) + " fps is beyond 99 hours");
  }
  return frame_index * 1000 / fps;
}

std::uint64_t frame_at_millis(std::uint64_t millis, std::uint8_t fps) {
  if (fps == 0) throw Error(Errc::InvalidArgument, "fps: must be >= 1");
  return (millis * fps + 999) / 1000;
}

std::string format_srt_time(std::uint64_t millis) {
  const auto ms = millis % 1000;
  const auto total_s = millis / 1000;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02llu:%02llu:%02llu,%03llu",
                static_cast<unsigned long long>(total_s / 3600),
                static_cast<unsigned long long>(total_s / 60 % 60),
                static_cast<unsigned long long>(total_s % 60),
                static_cast<unsigned long long>(ms));
  return buf;
}

std::string srt_timestamp(std::uint64_t frame_index, std::uint8_t fps) {
  return format_srt_time(frame_millis(frame_index, fps));
}

std::string build_srt(std::span<const EventRecord> events, std::uint8_t fps,
                      std::uint64_t frame_count) {
  if (events.empty()) return {};
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (!event_before(events[i - 1], events[i])) {
      throw Error(Errc::UnsortedEvents, "events: seq " + std::to_string(events[i].seq) +
                                            " is out of (frame_index, seq) order");
    }
  }
  if (events.back().frame_index > frame_count) {
    throw Error(Errc::OutOfRange, "frame_count: " + std::to_string(frame_count) +
                                      " is below event frame " +
                                      std::to_string(events.back().frame_index));
  }

  const std::uint64_t session_end = frame_millis(frame_count, fps);
  std::vector<std::uint64_t> ends(events.size());
  // Walk backwards so the next strictly later start is known at each step.
  std::optional<std::uint64_t> next_later;
  for (std::size_t k = events.size(); k-- > 0;) {
    const auto& e = events[k];
    if (k + 1 < events.size() && events[k + 1].frame_index > e.frame_index) {
      next_later = frame_millis(events[k + 1].frame_index, fps);
    }
    const std::uint64_t start = frame_millis(e.frame_index, fps);
    std::uint64_t end = std::min(start + 1000, session_end);
    if (next_later) end = std::min(end, *next_later);
    ends[k] = end;
  }

  std::string out;
  out.reserve(events.size() * 96);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    out += std::to_string(i + 1);
    out += '\n';
    out += srt_timestamp(e.frame_index, fps);
    out += " --> ";
    out += format_srt_time(ends[i]);
    out += '\n';
    out += event_kind_name(e.kind);
    out += ' ';
    out += single_line(e.payload);
    out += "\n\n";
  }
  return out;
}

std::vector<SrtCue> parse_srt(std::string_view text) {
  std::vector<SrtCue> cues;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    ++line_no;
    return true;
  };
  auto fail = [&](const std::string& what) {
    throw Error(Errc::PayloadMismatch, "srt line " + std::to_string(line_no) + ": " + what);
  };

  std::string_view line;
  while (next_line(line)) {
    if (line.empty()) continue;
    SrtCue cue;
    if (!parse_u64(line, cue.index)) fail("expected cue number");
    if (!next_line(line)) fail("missing timing line");
    auto arrow = line.find(" --> ");
    if (arrow == std::string_view::npos || !parse_time(line.substr(0, arrow), cue.start_ms) ||
        !parse_time(line.substr(arrow + 5), cue.end_ms)) {
      fail("malformed timing line");
    }
    bool first = true;
    while (next_line(line) && !line.empty()) {
      if (!first) cue.text += '\n';
      cue.text += line;
      first = false;
    }
    cues.push_back(std::move(cue));
  }
  return cues;
}

}  // namespace remcap
