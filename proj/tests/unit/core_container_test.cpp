// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "remcap/core/command.hpp"
#include "remcap/core/crc32.hpp"
#include "remcap/core/error.hpp"
#include "remcap/core/event.hpp"
#include "remcap/core/manifest.hpp"
#include "remcap/core/segment.hpp"

namespace remcap {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("remcap-" + name + "-" + Uuid::random().str());
  fs::create_directories(p);
  return p;
}

TEST(Crc32, MatchesBitwiseOracle) {
  const std::string check = "123456789";
  ByteView v(reinterpret_cast<const std::uint8_t*>(check.data()), check.size());
  EXPECT_EQ(testing::crc32_bitwise(v), 0xCBF43926u);
  EXPECT_EQ(crc32(v), 0xCBF43926u);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    Bytes b(rng() % 5000);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    Crc32 streaming;
    streaming.update(ByteView(b).first(b.size() / 3));
    streaming.update(ByteView(b).subspan(b.size() / 3));
    ASSERT_EQ(streaming.value(), testing::crc32_bitwise(b));
  }
}

TEST(Segment, FileNames) {
  EXPECT_EQ(segment_file_name(0), "00000000.seg");
  EXPECT_EQ(segment_file_name(300), "00000300.seg");
  EXPECT_EQ(segment_file_name(123456789), "123456789.seg");
}

TEST(Segment, WriterMatchesInMemoryEncodingAndChecksum) {
  auto dir = temp_dir("seg");
  std::mt19937_64 rng(3);
  std::vector<FrameRecord> frames;
  for (int i = 0; i < 20; ++i) {
    frames.push_back(testing::random_frame(rng, Preset::P360, i % 3 ? FrameEncoding::RleRgb24
                                                                   : FrameEncoding::RawRgb24));
  }
  SegmentWriter w(dir / "00000000.seg", 0);
  for (const auto& f : frames) w.append(encode_frame_record(f));
  auto info = w.finish();
  EXPECT_EQ(info.frame_count, 20u);
  EXPECT_EQ(info.file, "00000000.seg");

  auto on_disk = read_file(dir / "00000000.seg");
  EXPECT_EQ(on_disk, encode_segment(frames));
  EXPECT_EQ(std::string(on_disk.begin(), on_disk.begin() + 4), "EXSG");
  EXPECT_EQ(on_disk[4], 0x01);
  EXPECT_EQ(info.crc32, testing::crc32_bitwise(ByteView(on_disk).first(on_disk.size() - 4)));

  auto decoded = decode_segment(on_disk);
  EXPECT_EQ(decoded.frames, frames);
  EXPECT_EQ(decoded.crc32, info.crc32);
  fs::remove_all(dir);
}

TEST(Segment, TamperedByteFailsChecksum) {
  std::mt19937_64 rng(4);
  auto bytes = encode_segment({testing::random_frame(rng, Preset::P360, FrameEncoding::RawRgb24)});
  bytes[100] ^= 0x01;
  try {
    (void)decode_segment(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ChecksumMismatch);
  }
}

TEST(Segment, EmptySegmentIsValid) {
  auto bytes = encode_segment({});
  EXPECT_EQ(bytes.size(), 9u);
  EXPECT_TRUE(decode_segment(bytes).frames.empty());
}

TEST(Manifest, KeysFollowFieldOrderAndRoundTrip) {
  SessionManifest m;
  m.session_id = Uuid::random();
  m.scene_id = "lab-a";
  m.device_id = 2;
  m.fps = 30;
  m.resolution = Preset::P720;
  m.start_ts_micros = 1234;
  m.frame_count = 650;
  m.segments = {{"00000000.seg", 0, 300, 11}, {"00000300.seg", 300, 300, 22},
                {"00000600.seg", 600, 50, 33}};
  m.deterministic_clock = true;
  auto text = manifest_text(m);
  std::vector<std::string> keys{"session_id", "scene_id", "device_id", "fps", "resolution",
                                "start_ts_micros", "frame_count", "segments",
                                "deterministic_clock"};
  std::size_t pos = 0;
  for (const auto& k : keys) {
    auto at = text.find("\"" + k + "\"", pos);
    ASSERT_NE(at, std::string::npos) << k;
    pos = at;
  }
  EXPECT_EQ(manifest_from_json(nlohmann::json::parse(text)), m);
  EXPECT_EQ(m.delivered_frames(), 650u);
}

TEST(Manifest, RejectsOverlapAndBadFps) {
  SessionManifest m;
  m.session_id = Uuid::random();
  m.segments = {{"a", 0, 300, 0}, {"b", 299, 10, 0}};
  EXPECT_THROW(m.validate(), Error);
  m.segments.clear();
  m.fps = 0;
  EXPECT_THROW(m.validate(), Error);
  EXPECT_THROW((void)manifest_from_json(nlohmann::json::parse("{}")), Error);
}

TEST(Command, ClampAndCanonicalPayload) {
  ControlCommand c{1, CommandKind::SetSteering, 45.0, 0};
  EXPECT_FALSE(c.in_range());
  EXPECT_EQ(c.clamped().value, 30.0);
  EXPECT_EQ(command_payload(c.clamped()).dump(), R"({"kind":"SET_STEERING","value":30})");
  ControlCommand tilt{2, CommandKind::SetCamTilt, -40.5, 0};
  EXPECT_EQ(tilt.clamped().value, -35.0);
  ControlCommand half{3, CommandKind::SetCamPan, 12.5, 0};
  EXPECT_EQ(command_payload(half).dump(), R"({"kind":"SET_CAM_PAN","value":12.5})");
  ControlCommand stop{4, CommandKind::Stop, 9, 0};
  EXPECT_EQ(command_payload(stop.clamped()).dump(), R"({"kind":"STOP"})");
  EXPECT_EQ(command_from_payload(command_payload(half)).value, 12.5);
  EXPECT_THROW((void)command_from_payload(nlohmann::json::parse(R"({"kind":"JUMP"})")), Error);
}

TEST(Event, CanonicalJsonSortsAndCompacts) {
  EXPECT_EQ(canonical_json("{ \"b\": 1,\n \"a\": [1, 2] }"), R"({"a":[1,2],"b":1})");
  EXPECT_THROW((void)canonical_json("{nope"), Error);
  EventRecord e{Uuid::random(), 3, EventKind::Inference, 10, 99, "{}"};
  EXPECT_EQ(event_from_json(to_json(e)), e);
}

}  // namespace
}  // namespace remcap

namespace remcap {
namespace {

class SegmentReaderTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("remcap-segreader-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 7; ++i) {
      auto f = testing::random_frame(rng, Preset::P360,
                                     i % 2 ? FrameEncoding::RleRgb24 : FrameEncoding::RawRgb24);
      f.frame_index = static_cast<std::uint64_t>(i) * 3;
      frames_.push_back(f);
    }
    bytes_ = encode_segment(frames_);
    write_file(path(), bytes_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path path() const { return dir_ / "00000000.seg"; }

  std::filesystem::path dir_;
  std::vector<FrameRecord> frames_;
  Bytes bytes_;
};

TEST_F(SegmentReaderTest, StreamsSameRecordsAsWholeFileDecode) {
  SegmentReader reader(path());
  std::vector<FrameRecord> got;
  Bytes concat;
  while (auto item = reader.next()) {
    got.push_back(item->frame);
    concat.insert(concat.end(), item->encoded.begin(), item->encoded.end());
  }
  EXPECT_EQ(got, frames_);
  EXPECT_EQ(reader.stored_crc(), crc32(ByteView(bytes_).first(bytes_.size() - 4)));
  Bytes expect(bytes_.begin() + 5, bytes_.end() - 4);
  EXPECT_EQ(concat, expect);
  EXPECT_EQ(verify_segment_file(path()), reader.stored_crc());
}

TEST_F(SegmentReaderTest, TamperedByteFailsAtEnd) {
  bytes_[bytes_.size() / 2] ^= 0x01;
  write_file(path(), bytes_);
  try {
    verify_segment_file(path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ChecksumMismatch);
  }
  SegmentReader reader(path());
  bool mismatch = false;
  try {
    while (reader.next()) {
    }
  } catch (const Error& e) {
    // Either the flipped byte breaks a record or the crc catches it.
    mismatch = true;
  }
  EXPECT_TRUE(mismatch);
}

TEST_F(SegmentReaderTest, EnvelopeErrors) {
  Bytes bad = bytes_;
  bad[0] = 'X';
  write_file(path(), bad);
  EXPECT_THROW(SegmentReader{path()}, Error);
  EXPECT_THROW(verify_segment_file(path()), Error);
  write_file(path(), Bytes{'E', 'X'});
  EXPECT_THROW(verify_segment_file(path()), Error);
  EXPECT_THROW(SegmentReader{path()}, Error);
}

}  // namespace
}  // namespace remcap
