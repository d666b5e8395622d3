// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "container_fixture.hpp"
#include "oracles.hpp"
#include "remcap/core/srt.hpp"
#include "remcap/inference/detector.hpp"
#include "remcap/packer/packer.hpp"

namespace fs = std::filesystem;
using namespace remcap;
using remcap::testing::build_container;
using remcap::testing::FixtureSpec;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("remcap-packer-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

agent::ScriptedCommand cmd(std::uint64_t at, CommandKind kind, double value) {
  return {at, ControlCommand{0, kind, value, 0}};
}

FixtureSpec scripted_spec() {
  FixtureSpec s;
  s.frames = 150;
  s.script = {cmd(10, CommandKind::SetSpeed, 60), cmd(30, CommandKind::SetSteering, 20),
              cmd(50, CommandKind::SetSpeed, 100), cmd(100, CommandKind::SetSteering, -30),
              cmd(120, CommandKind::Stop, 0)};
  s.markers = {{60, "How confident are you?"}};
  return s;
}

void rewrite_segment(const fs::path& path, const std::vector<FrameRecord>& frames) {
  write_file(path, encode_segment(frames));
}

}  // namespace

TEST(Packer, ScriptedContainerPassesEveryCheck) {
  TempDir dir;
  auto fx = build_container(dir.path() / "c", scripted_spec());
  const auto report = packer::verify_container(fx.layout.root);
  ASSERT_EQ(report.checks.size(), 4u);
  for (const auto& c : report.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  EXPECT_EQ(report.frames_checked, 150u);
  EXPECT_TRUE(report.passed());
}

TEST(Packer, ManifestMatchesWhatWasWritten) {
  TempDir dir;
  auto fx = build_container(dir.path() / "c", scripted_spec());
  const auto m = packer::read_manifest(fx.layout.root);
  EXPECT_EQ(m, fx.manifest);
  EXPECT_EQ(m.delivered_frames(), 150u);
  ASSERT_EQ(m.segments.size(), 1u);
  EXPECT_EQ(m.segments[0].file, "00000000.seg");
}

TEST(Packer, MarkerCueStartsAtTwoSecondsAndCoversOneSecond) {
  TempDir dir;
  auto fx = build_container(dir.path() / "c", scripted_spec());
  const auto srt = read_text_file(fx.layout.srt());
  EXPECT_NE(srt.find("00:00:02,000 --> 00:00:03,000\nMARKER {\"text\":\"How confident are you?\"}"),
            std::string::npos)
      << srt;
}

TEST(Packer, ReplayOverlaysMarkerOnFrames60To89Only) {
  TempDir dir;
  auto fx = build_container(dir.path() / "c", scripted_spec());
  auto items = packer::replay(fx.layout.root, 55, 40);
  ASSERT_EQ(items.size(), 40u);
  for (const auto& item : items) {
    bool marker = false;
    for (const auto& c : item.cues) marker = marker || c.text.rfind("MARKER", 0) == 0;
    const auto n = item.frame.frame_index;
    EXPECT_EQ(marker, n >= 60 && n <= 89) << "frame " << n;
  }
}

TEST(Packer, ReplayReproducesSegmentBytes) {
  TempDir dir;
  auto spec = scripted_spec();
  spec.frames = 650;
  spec.undelivered = {3, 4, 299, 300, 301, 640};
  auto fx = build_container(dir.path() / "c", spec);
  ASSERT_EQ(fx.manifest.segments.size(), 3u);
  auto items = packer::replay(fx.layout.root, 0);
  ASSERT_EQ(items.size(), fx.delivered.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    ASSERT_EQ(encode_frame_record(items[i].frame), encode_frame_record(fx.delivered[i])) << i;
  }
}

TEST(Packer, ReplayStartsAtNextDeliveredFrame) {
  TempDir dir;
  auto spec = scripted_spec();
  spec.undelivered = {20, 21, 22};
  auto fx = build_container(dir.path() / "c", spec);
  auto items = packer::replay(fx.layout.root, 20, 1);
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].frame.frame_index, 23u);
}

TEST(Packer, ReplayPastTheEndIsFrameOutOfRange) {
  TempDir dir;
  auto fx = build_container(dir.path() / "c", scripted_spec());
  try {
    packer::ReplayReader r(fx.layout.root, 150);
    FAIL() << "expected FrameOutOfRange";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::FrameOutOfRange);
  }
}

TEST(Packer, ZeroEventsGiveAnEmptySrt) {
  TempDir dir;
  FixtureSpec spec;
  spec.frames = 30;
  spec.lifecycle = false;
  auto fx = build_container(dir.path() / "c", spec);
  EXPECT_EQ(read_text_file(fx.layout.srt()), "");
  EXPECT_TRUE(packer::verify_container(fx.layout.root).passed());
}

TEST(Packer, ZeroedIndexStripFailsFrameIndexCheck) {
  TempDir dir;
  auto fx = build_container(dir.path() / "c", scripted_spec());
  auto frames = fx.delivered;
  auto& f = frames[42];
  const std::size_t row = static_cast<std::size_t>(f.width) * 3;
  std::fill(f.payload.begin(), f.payload.begin() + row, 0);
  const auto seg = fx.layout.segment(fx.manifest.segments[0].file);
  rewrite_segment(seg, frames);
  // Keep the manifest crc in step so only the strip check can object.
  auto m = fx.manifest;
  m.segments[0].crc32 = verify_segment_file(seg);
  write_text_file(fx.layout.manifest(), manifest_text(m));

  const auto report = packer::verify_container(fx.layout.root);
  EXPECT_TRUE(report.check("segments").passed) << report.check("segments").detail;
  EXPECT_FALSE(report.check("frame_index").passed);
  EXPECT_EQ(report.check("frame_index").first_offending_frame, 42u);
}

TEST(Packer, CommandPastTheEndFailsCommandRangeCheck) {
  TempDir dir;
  auto fx = build_container(dir.path() / "c", scripted_spec());
  const auto when = frame_millis(fx.manifest.frame_count + 5, fx.manifest.fps);
  std::ofstream(fx.layout.srt(), std::ios::app)
      << "99\n"
      << format_srt_time(when) << " --> " << format_srt_time(when + 1000) << "\n"
      << "COMMAND {\"kind\":\"STOP\"}\n\n";
  const auto report = packer::verify_container(fx.layout.root);
  EXPECT_FALSE(report.check("command_range").passed);
  EXPECT_EQ(report.check("command_range").first_offending_frame, fx.manifest.frame_count + 5);
}

TEST(Packer, MovedCommandFailsResimulation) {
  TempDir dir;
  auto fx = build_container(dir.path() / "c", scripted_spec());
  auto srt = read_text_file(fx.layout.srt());
  // The SET_SPEED 60 cue at frame 10 (333 ms) claims frame 12 (400 ms) instead.
  const auto from = srt_timestamp(10, 30), to = srt_timestamp(12, 30);
  const auto pos = srt.find(from + " --> ");
  ASSERT_NE(pos, std::string::npos);
  srt.replace(pos, from.size(), to);
  write_text_file(fx.layout.srt(), srt);
  const auto report = packer::verify_container(fx.layout.root);
  EXPECT_FALSE(report.check("resimulation").passed);
  EXPECT_TRUE(report.check("frame_index").passed);
}

TEST(Packer, NonDeterministicSessionSkipsResimulation) {
  TempDir dir;
  auto spec = scripted_spec();
  spec.deterministic = false;
  auto fx = build_container(dir.path() / "c", spec);
  const auto report = packer::verify_container(fx.layout.root);
  EXPECT_TRUE(report.check("resimulation").passed);
  EXPECT_NE(report.check("resimulation").detail.find("skipped"), std::string::npos);
}

TEST(Packer, TamperedSegmentFailsSegmentsCheck) {
  TempDir dir;
  auto fx = build_container(dir.path() / "c", scripted_spec());
  const auto seg = fx.layout.segment(fx.manifest.segments[0].file);
  {
    std::fstream f(seg, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(5000);
    f.put('\x55');
  }
  const auto report = packer::verify_container(fx.layout.root);
  EXPECT_FALSE(report.check("segments").passed);
}

TEST(Packer, MissingSegmentIsReported) {
  TempDir dir;
  auto fx = build_container(dir.path() / "c", scripted_spec());
  fs::remove(fx.layout.segment(fx.manifest.segments[0].file));
  EXPECT_FALSE(packer::verify_container(fx.layout.root).check("segments").passed);
  try {
    packer::write_container(fx.layout, fx.manifest, {});
    FAIL() << "expected MissingSegment";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingSegment);
  }
}

TEST(Packer, NotAContainer) {
  TempDir dir;
  try {
    packer::verify_container(dir.path());
    FAIL() << "expected NotAContainer";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotAContainer);
  }
}

TEST(Packer, MarkerAfterLastFrameExtendsFrameCount) {
  TempDir dir;
  auto spec = scripted_spec();
  spec.markers.push_back({200, "late"});
  auto fx = build_container(dir.path() / "c", spec);
  EXPECT_EQ(fx.manifest.frame_count, 201u);
  EXPECT_TRUE(packer::verify_container(fx.layout.root).passed());
}
