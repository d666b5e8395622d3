// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "remcap/core/resolution.hpp"
#include "remcap/core/uuid.hpp"

namespace remcap {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

enum class FrameEncoding : std::uint8_t { RawRgb24 = 0, RleRgb24 = 1 };

inline constexpr std::size_t kFrameHeaderSize = 48;
inline constexpr std::uint8_t kFrameVersion = 0x01;

/// One captured frame. `payload` holds the bytes as they travel on the wire,
/// i.e. RLE pairs when `encoding == RleRgb24`.
struct FrameRecord {
  Uuid session_id;
  std::uint16_t device_id = 0;
  std::uint64_t frame_index = 0;
  std::uint64_t capture_ts_micros = 0;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  FrameEncoding encoding = FrameEncoding::RawRgb24;
  Bytes payload;

  /// RGB24 pixels, expanding RLE if needed. Throws PayloadMismatch.
  Bytes pixels() const;
  std::size_t encoded_size() const noexcept { return kFrameHeaderSize + payload.size(); }

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

/// Run-length coding over raw bytes: <count u8 in 1..255, value> pairs.
Bytes rle_encode(ByteView raw);
/// Expands RLE pairs; the result must be exactly `expected_size` bytes.
Bytes rle_decode(ByteView rle, std::size_t expected_size);

Bytes encode_frame_record(const FrameRecord& frame);
void append_frame_record(Bytes& out, const FrameRecord& frame);

/// Decodes exactly one record; trailing bytes are a PayloadMismatch.
FrameRecord decode_frame_record(ByteView bytes);

/// Parses the 48-byte header only and returns the payload length it declares.
/// Useful for stream readers that must know how many bytes to wait for.
std::uint32_t peek_payload_length(ByteView header);

struct DecodedPrefix {
  FrameRecord frame;
  std::size_t consumed;
};
/// Decodes the record at the start of `bytes`, leaving any remainder.
DecodedPrefix decode_frame_prefix(ByteView bytes);

/// Reads the 64-bit index embedded in row 0, pixels 0..63 (red >= 128 is a 1 bit,
/// LSB first).
std::uint64_t extract_frame_index(const FrameRecord& frame);
std::uint64_t extract_frame_index(ByteView rgb, std::uint16_t width);

}  // namespace remcap
