// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "remcap/core/crc32.hpp"
#include "remcap/core/frame.hpp"

namespace remcap {

// Segment file: "EXSG" | 0x01 | EXFR records... | crc32 (LE) of everything before it.
inline constexpr std::size_t kSegmentHeaderSize = 5;
inline constexpr std::size_t kSegmentTrailerSize = 4;

/// File name for a segment whose first delivered frame has `first_frame_index`.
std::string segment_file_name(std::uint64_t first_frame_index);

struct SegmentInfo {
  std::string file;
  std::uint64_t first_frame_index = 0;
  std::uint64_t frame_count = 0;
  std::uint32_t crc32 = 0;

  friend bool operator==(const SegmentInfo&, const SegmentInfo&) = default;
};

/// Incremental writer; the checksum trailer is written by finish().
class SegmentWriter {
 public:
  SegmentWriter(const std::filesystem::path& path, std::uint64_t first_frame_index);
  ~SegmentWriter();
  SegmentWriter(const SegmentWriter&) = delete;
  SegmentWriter& operator=(const SegmentWriter&) = delete;

  /// Appends one already-encoded EXFR record.
  void append(ByteView encoded_record);
  SegmentInfo finish();

  std::uint64_t frame_count() const noexcept { return info_.frame_count; }
  bool finished() const noexcept { return file_ == nullptr; }

 private:
  void write(ByteView bytes);

  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  SegmentInfo info_;
  Crc32 crc_;
};

/// Serializes a complete segment in memory.
/// Streams records out of a segment file without loading it whole. The crc32
/// trailer is checked once the last record has been read.
class SegmentReader {
 public:
  /// Throws IoError, BadMagic, BadVersion, TruncatedRecord.
  explicit SegmentReader(const std::filesystem::path& path);
  ~SegmentReader();
  SegmentReader(const SegmentReader&) = delete;
  SegmentReader& operator=(const SegmentReader&) = delete;

  struct Item {
    FrameRecord frame;
    Bytes encoded;  // the record bytes exactly as stored
  };
  /// Next record, or nullopt after the last one (crc verified at that point,
  /// throwing ChecksumMismatch). Decode failures throw the frame errors.
  std::optional<Item> next();
  /// Crc stored in the trailer.
  std::uint32_t stored_crc() const noexcept { return stored_crc_; }

 private:
  std::FILE* file_ = nullptr;
  std::string name_;
  std::uint64_t body_end_ = 0;
  std::uint64_t pos_ = 0;
  std::uint32_t stored_crc_ = 0;
  Crc32 crc_;
  bool done_ = false;
};

/// Streams the file and checks its trailer; returns the crc.
/// Throws ChecksumMismatch and the envelope errors.
std::uint32_t verify_segment_file(const std::filesystem::path& path);

Bytes encode_segment(const std::vector<FrameRecord>& frames);

struct DecodedSegment {
  std::vector<FrameRecord> frames;
  std::uint32_t crc32 = 0;
};
/// Validates magic, version and checksum, then decodes every record.
/// Throws BadMagic / BadVersion / TruncatedRecord / ChecksumMismatch / decode errors.
DecodedSegment decode_segment(ByteView bytes);
/// Checks magic and trailer only and returns the stored checksum.
std::uint32_t verify_segment_checksum(ByteView bytes);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteView bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace remcap
