// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/packer/packer.hpp"

#include <algorithm>

#include "remcap/agent/kinematics.hpp"
#include "remcap/agent/renderer.hpp"
#include "remcap/core/command.hpp"
#include "remcap/core/error.hpp"
#include "remcap/inference/detector.hpp"

namespace remcap::packer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_segments(const ContainerLayout& layout, const SessionManifest& m) {
  for (const auto& seg : m.segments) {
    const auto path = layout.segment(seg.file);
    if (!fs::exists(path)) throw Error(Errc::MissingSegment, "segments/" + seg.file);
    const auto crc = verify_segment_file(path);
    if (crc != seg.crc32) {
      throw Error(Errc::ChecksumMismatch, seg.file + ": crc32 " + std::to_string(crc) +
                                              ", manifest records " + std::to_string(seg.crc32));
    }
  }
}

void write_atomically(const fs::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  write_text_file(tmp, text);
  fs::rename(tmp, path);
}

/// Cue text is "KIND payload".
std::pair<std::string, json> split_cue(const std::string& text) {
  const auto sp = text.find(' ');
  if (sp == std::string::npos) return {text, json()};
  return {text.substr(0, sp), json::parse(text.substr(sp + 1), nullptr, false)};
}

}  // namespace

SessionManifest write_container(const ContainerLayout& layout, SessionManifest manifest,
                                std::vector<EventRecord> events) {
  fs::create_directories(layout.segments_dir());
  check_segments(layout, manifest);
  std::stable_sort(events.begin(), events.end(), [](const EventRecord& a, const EventRecord& b) {
    return a.frame_index != b.frame_index ? a.frame_index < b.frame_index : a.seq < b.seq;
  });
  // Markers may be placed past the last captured frame.
  if (!events.empty()) manifest.frame_count = std::max(manifest.frame_count, events.back().frame_index + 1);
  manifest.validate();
  write_atomically(layout.srt(), build_srt(events, manifest.fps, manifest.frame_count));
  write_atomically(layout.manifest(), manifest_text(manifest));
  return manifest;
}

SessionManifest pack_session(gateway::Gateway& gw, const Uuid& session_id) {
  const auto info = gw.session_info(session_id);
  const ContainerLayout layout{info.container_dir};
  if (info.state.status == gateway::SessionStatus::Packed) {
    check_segments(layout, *info.state.manifest);
    return *info.state.manifest;
  }
  if (info.state.status != gateway::SessionStatus::Stopping || !info.finalized) {
    throw Error(Errc::SessionNotStopped,
                "session " + session_id.str() + " is " +
                    std::string(gateway::session_status_name(info.state.status)));
  }
  SessionManifest m;
  m.session_id = session_id;
  m.scene_id = info.state.scene_id;
  m.device_id = info.state.device_id;
  m.fps = info.agent.fps;
  m.resolution = info.agent.resolution;
  m.start_ts_micros = info.start_ts_micros;
  m.frame_count = info.frame_count();
  if (info.ingest) m.segments = info.ingest->segments;
  m.deterministic_clock = info.agent.deterministic;
  m = write_container(layout, std::move(m), gw.read_events(session_id));
  gw.mark_packed(session_id, m);
  return m;
}

// ---------------------------------------------------------------- verify

bool VerificationReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const VerificationCheck& VerificationReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error(Errc::InvalidArgument, "no check named " + name);
}

json to_json(const VerificationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"first_offending_frame",
                       c.first_offending_frame ? json(*c.first_offending_frame) : json(nullptr)},
                      {"detail", c.detail}});
  }
  return {{"passed", report.passed()}, {"frames_checked", report.frames_checked}, {"checks", checks}};
}

SessionManifest read_manifest(const fs::path& root) {
  const ContainerLayout layout{root};
  if (!fs::is_directory(root) || !fs::is_regular_file(layout.manifest())) {
    throw Error(Errc::NotAContainer, root.string() + ": no manifest.json");
  }
  auto j = json::parse(read_text_file(layout.manifest()), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::ManifestParseError, "manifest.json: not JSON");
  return manifest_from_json(j);
}

namespace {

struct ScriptStep {
  std::uint64_t frame;
  ControlCommand command;
};

std::vector<SrtCue> read_cues(const ContainerLayout& layout) {
  if (!fs::is_regular_file(layout.srt())) {
    throw Error(Errc::NotAContainer, layout.root.string() + ": no session.srt");
  }
  return parse_srt(read_text_file(layout.srt()));
}

}  // namespace

VerificationReport verify_container(const fs::path& root) {
  const ContainerLayout layout{root};
  const SessionManifest m = read_manifest(root);
  const auto cues = read_cues(layout);

  VerificationCheck seg{"segments", true, std::nullopt, ""};
  VerificationCheck idx{"frame_index", true, std::nullopt, ""};
  VerificationCheck cmd{"command_range", true, std::nullopt, ""};
  VerificationCheck sim{"resimulation", true, std::nullopt, ""};
  auto fail = [](VerificationCheck& c, std::uint64_t frame, std::string detail) {
    if (!c.passed) return;
    c.passed = false;
    c.first_offending_frame = frame;
    c.detail = std::move(detail);
  };

  // (c) and the re-simulation script both come from the SRT cues.
  double wheelbase = agent::kDefaultWheelbase;
  std::vector<ScriptStep> script;
  for (const auto& cue : cues) {
    auto [kind, payload] = split_cue(cue.text);
    const auto frame = frame_at_millis(cue.start_ms, m.fps);
    if (kind == "COMMAND") {
      if (frame >= m.frame_count) {
        fail(cmd, frame, "COMMAND at frame " + std::to_string(frame) + " outside [0, " +
                             std::to_string(m.frame_count) + ")");
      }
      try {
        script.push_back({frame, command_from_payload(payload)});
      } catch (const Error& e) {
        fail(sim, frame, "unreadable COMMAND cue: " + e.detail());
      }
    } else if (kind == "LIFECYCLE" && payload.is_object() &&
               payload.value("event", "") == "started" && payload.contains("wheelbase")) {
      wheelbase = payload["wheelbase"].get<double>();
    }
  }
  if (!m.deterministic_clock) sim.detail = "skipped: session not deterministic";

  const auto dims = dimensions(m.resolution);
  const double dt = 1.0 / m.fps;
  agent::PoseState pose;
  std::uint64_t next_frame = 0;  // first frame not yet simulated
  std::size_t next_cmd = 0;
  VerificationReport report;

  for (const auto& info : m.segments) {
    const auto path = layout.segment(info.file);
    if (!fs::exists(path)) {
      fail(seg, info.first_frame_index, "segments/" + info.file + " missing");
      continue;
    }
    std::uint64_t count = 0;
    try {
      SegmentReader reader(path);
      while (auto item = reader.next()) {
        const auto& f = item->frame;
        if (count == 0 && f.frame_index != info.first_frame_index) {
          fail(seg, f.frame_index, info.file + " starts at a different frame");
        }
        ++count;
        ++report.frames_checked;
        const Bytes px = f.pixels();
        const auto embedded = extract_frame_index(px, f.width);
        if (embedded != f.frame_index) {
          fail(idx, f.frame_index, "strip reads " + std::to_string(embedded));
        }
        if (m.deterministic_clock && sim.passed) {
          while (next_frame <= f.frame_index) {
            while (next_cmd < script.size() && script[next_cmd].frame <= next_frame) {
              pose = agent::apply_control(pose, script[next_cmd].command);
              ++next_cmd;
            }
            pose = agent::step_kinematics(pose, dt, wheelbase);
            ++next_frame;
          }
          const auto want = agent::marker_origin(pose.x, pose.y, dims);
          const auto got = inference::detect_marker(px, f.width, f.height);
          if (got.size() != 1 || got[0].x != want.u || got[0].y != want.v) {
            fail(sim, f.frame_index,
                 "marker expected at (" + std::to_string(want.u) + "," + std::to_string(want.v) +
                     ")" +
                     (got.empty() ? std::string(", none found")
                                  : ", found (" + std::to_string(got[0].x) + "," +
                                        std::to_string(got[0].y) + ")"));
          }
        }
      }
      if (reader.stored_crc() != info.crc32) {
        fail(seg, info.first_frame_index, info.file + ": trailer crc differs from manifest");
      }
      if (count != info.frame_count) {
        fail(seg, info.first_frame_index, info.file + ": " + std::to_string(count) +
                                              " frames, manifest records " +
                                              std::to_string(info.frame_count));
      }
    } catch (const Error& e) {
      fail(seg, info.first_frame_index, info.file + ": " + e.what());
    }
  }
  report.checks = {seg, idx, cmd, sim};
  return report;
}

// ---------------------------------------------------------------- replay

ReplayReader::ReplayReader(const fs::path& root, std::uint64_t from_frame)
    : layout_{root}, manifest_(read_manifest(root)), cues_(read_cues(layout_)) {
  // Skip whole segments that end before from_frame.
  while (segment_ + 1 < manifest_.segments.size() &&
         manifest_.segments[segment_ + 1].first_frame_index <= from_frame) {
    ++segment_;
  }
  while (auto f = read_frame()) {
    if (f->frame_index >= from_frame) {
      pending_ = std::move(f);
      return;
    }
  }
  throw Error(Errc::FrameOutOfRange, "no delivered frame at or after " + std::to_string(from_frame));
}

ReplayReader::~ReplayReader() = default;

std::optional<FrameRecord> ReplayReader::read_frame() {
  while (segment_ < manifest_.segments.size()) {
    if (!reader_) {
      const auto path = layout_.segment(manifest_.segments[segment_].file);
      if (!fs::exists(path)) {
        throw Error(Errc::MissingSegment, "segments/" + manifest_.segments[segment_].file);
      }
      reader_ = std::make_unique<SegmentReader>(path);
    }
    if (auto item = reader_->next()) return std::move(item->frame);
    reader_.reset();
    ++segment_;
  }
  return std::nullopt;
}

std::vector<SrtCue> ReplayReader::cues_at(std::uint64_t frame_index) const {
  const auto t = frame_millis(frame_index, manifest_.fps);
  // Cues are sorted by start and last at most 1 s.
  auto hi = std::upper_bound(cues_.begin(), cues_.end(), t,
                             [](std::uint64_t v, const SrtCue& c) { return v < c.start_ms; });
  std::vector<SrtCue> out;
  for (auto it = hi; it != cues_.begin();) {
    --it;
    if (it->start_ms + 1000 < t) break;
    if (it->covers(t)) out.push_back(*it);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::optional<ReplayItem> ReplayReader::next() {
  std::optional<FrameRecord> f;
  if (pending_) {
    f = std::move(pending_);
    pending_.reset();
  } else {
    f = read_frame();
  }
  if (!f) return std::nullopt;
  ReplayItem item{std::move(*f), {}};
  item.cues = cues_at(item.frame.frame_index);
  return item;
}

std::vector<ReplayItem> replay(const fs::path& root, std::uint64_t from_frame,
                               std::size_t max_items) {
  ReplayReader reader(root, from_frame);
  std::vector<ReplayItem> out;
  while (out.size() < max_items) {
    auto item = reader.next();
    if (!item) break;
    out.push_back(std::move(*item));
  }
  return out;
}

// ---------------------------------------------------------------- service

PackingService::PackingService(gateway::Gateway& gw)
    : gateway_(gw), sub_(gw.subscribe(gateway::kPackingChannel)) {
  worker_ = std::thread([this] { run(); });
}

PackingService::~PackingService() { stop(); }

void PackingService::stop() {
  gateway_.unsubscribe(gateway::kPackingChannel, sub_);
  if (worker_.joinable()) worker_.join();
}

std::optional<std::string> PackingService::last_error() const {
  std::lock_guard lock(mu_);
  return last_error_;
}

void PackingService::run() {
  while (auto msg = sub_->pop()) {
    auto j = json::parse(*msg, nullptr, false);
    if (j.is_discarded()) continue;
    auto id = Uuid::parse(j.value("session_id", ""));
    if (!id) continue;
    try {
      pack_session(gateway_, *id);
      ++packed_;
    } catch (const Error& e) {
      ++failed_;
      {
        std::lock_guard lock(mu_);
        last_error_ = e.what();
      }
      try {
        gateway_.append_event(*id, EventKind::Lifecycle, 0,
                              json{{"event", "pack_failed"},
                                   {"error", errc_name(e.code())},
                                   {"detail", e.detail()}}
                                  .dump());
      } catch (const Error&) {
      }
    }
  }
}

}  // namespace remcap::packer
