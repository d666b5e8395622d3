// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/core/frame.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "remcap/core/bytes.hpp"
#include "remcap/core/error.hpp"

namespace remcap {

namespace {

constexpr std::uint8_t kMagic[4] = {'E', 'X', 'F', 'R'};

// Header offsets.
constexpr std::size_t kOffVersion = 4;
constexpr std::size_t kOffSession = 5;
constexpr std::size_t kOffDevice = 21;
constexpr std::size_t kOffIndex = 23;
constexpr std::size_t kOffTs = 31;
constexpr std::size_t kOffWidth = 39;
constexpr std::size_t kOffHeight = 41;
constexpr std::size_t kOffEncoding = 43;
constexpr std::size_t kOffPayloadLen = 44;
static_assert(kOffPayloadLen + 4 == kFrameHeaderSize);

struct Header {
  FrameRecord meta;  // payload left empty
  std::uint32_t payload_len = 0;
};

Header parse_header(ByteView bytes) {
  if (bytes.size() < sizeof(kMagic)) {
    throw Error(Errc::TruncatedRecord, "magic: record shorter than 4 bytes");
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(Errc::BadMagic, "magic: expected \"EXFR\"");
  }
  if (bytes.size() <= kOffVersion) {
    throw Error(Errc::TruncatedRecord, "version: header incomplete");
  }
  if (bytes[kOffVersion] != kFrameVersion) {
    throw Error(Errc::BadVersion, "version: unsupported " + std::to_string(bytes[kOffVersion]));
  }
  if (bytes.size() < kFrameHeaderSize) {
    throw Error(Errc::TruncatedRecord, "header: " + std::to_string(bytes.size()) + " of " +
                                           std::to_string(kFrameHeaderSize) + " bytes");
  }
  Header h;
  const auto* p = bytes.data();
  Uuid::Bytes id;
  std::memcpy(id.data(), p + kOffSession, id.size());
  h.meta.session_id = Uuid(id);
  h.meta.device_id = le::load<std::uint16_t>(p + kOffDevice);
  h.meta.frame_index = le::load<std::uint64_t>(p + kOffIndex);
  h.meta.capture_ts_micros = le::load<std::uint64_t>(p + kOffTs);
  h.meta.width = le::load<std::uint16_t>(p + kOffWidth);
  h.meta.height = le::load<std::uint16_t>(p + kOffHeight);
  auto enc = p[kOffEncoding];
  if (enc > static_cast<std::uint8_t>(FrameEncoding::RleRgb24)) {
    throw Error(Errc::PayloadMismatch, "encoding: unknown value " + std::to_string(enc));
  }
  h.meta.encoding = static_cast<FrameEncoding>(enc);
  if (!preset_for(h.meta.width, h.meta.height)) {
    throw Error(Errc::PayloadMismatch, "width/height: " + std::to_string(h.meta.width) + "x" +
                                           std::to_string(h.meta.height) +
                                           " is not a resolution preset");
  }
  h.payload_len = le::load<std::uint32_t>(p + kOffPayloadLen);
  return h;
}

void check_payload(const FrameRecord& f) {
  const std::size_t expected = static_cast<std::size_t>(f.width) * f.height * 3;
  if (f.encoding == FrameEncoding::RawRgb24) {
    if (f.payload.size() != expected) {
      throw Error(Errc::PayloadMismatch, "payload_len: " + std::to_string(f.payload.size()) +
                                             " != width*height*3 = " + std::to_string(expected));
    }
  } else {
    (void)rle_decode(f.payload, expected);
  }
}

}  // namespace

Bytes FrameRecord::pixels() const {
  const std::size_t expected = static_cast<std::size_t>(width) * height * 3;
  if (encoding == FrameEncoding::RleRgb24) return rle_decode(payload, expected);
  if (payload.size() != expected) {
    throw Error(Errc::PayloadMismatch, "payload_len: raw payload size " +
                                           std::to_string(payload.size()) + " != " +
                                           std::to_string(expected));
  }
  return payload;
}

Bytes rle_encode(ByteView raw) {
  Bytes out;
  out.reserve(raw.size() / 64 + 2);
  std::size_t i = 0;
  while (i < raw.size()) {
    const std::uint8_t value = raw[i];
    std::size_t run = 1;
    while (i + run < raw.size() && run < 255 && raw[i + run] == value) ++run;
    out.push_back(static_cast<std::uint8_t>(run));
    out.push_back(value);
    i += run;
  }
  return out;
}

Bytes rle_decode(ByteView rle, std::size_t expected_size) {
  if (rle.size() % 2 != 0) {
    throw Error(Errc::PayloadMismatch, "payload: RLE stream has odd length");
  }
  Bytes out;
  out.reserve(expected_size);
  for (std::size_t i = 0; i < rle.size(); i += 2) {
    const std::uint8_t count = rle[i];
    if (count == 0) {
      throw Error(Errc::PayloadMismatch, "payload: RLE run of length 0 at byte " + std::to_string(i));
    }
    if (out.size() + count > expected_size) {
      throw Error(Errc::PayloadMismatch, "payload: RLE expands beyond width*height*3 = " +
                                             std::to_string(expected_size));
    }
    out.insert(out.end(), count, rle[i + 1]);
  }
  if (out.size() != expected_size) {
    throw Error(Errc::PayloadMismatch, "payload: RLE expands to " + std::to_string(out.size()) +
                                           " != width*height*3 = " + std::to_string(expected_size));
  }
  return out;
}

void append_frame_record(Bytes& out, const FrameRecord& f) {
  out.reserve(out.size() + f.encoded_size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kFrameVersion);
  out.insert(out.end(), f.session_id.bytes().begin(), f.session_id.bytes().end());
  le::put(out, f.device_id);
  le::put(out, f.frame_index);
  le::put(out, f.capture_ts_micros);
  le::put(out, f.width);
  le::put(out, f.height);
  out.push_back(static_cast<std::uint8_t>(f.encoding));
  le::put(out, static_cast<std::uint32_t>(f.payload.size()));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
}

Bytes encode_frame_record(const FrameRecord& frame) {
  Bytes out;
  append_frame_record(out, frame);
  return out;
}

std::uint32_t peek_payload_length(ByteView header) { return parse_header(header).payload_len; }

DecodedPrefix decode_frame_prefix(ByteView bytes) {
  Header h = parse_header(bytes);
  const std::size_t total = kFrameHeaderSize + h.payload_len;
  if (bytes.size() < total) {
    throw Error(Errc::TruncatedRecord, "payload: " + std::to_string(bytes.size() - kFrameHeaderSize) +
                                           " of " + std::to_string(h.payload_len) + " bytes");
  }
  h.meta.payload.assign(bytes.begin() + kFrameHeaderSize, bytes.begin() + total);
  check_payload(h.meta);
  return {std::move(h.meta), total};
}

FrameRecord decode_frame_record(ByteView bytes) {
  auto [frame, consumed] = decode_frame_prefix(bytes);
  if (consumed != bytes.size()) {
    throw Error(Errc::PayloadMismatch, "payload_len: " + std::to_string(bytes.size() - consumed) +
                                           " trailing bytes after record");
  }
  return std::move(frame);
}

std::uint64_t extract_frame_index(ByteView rgb, std::uint16_t width) {
  std::uint64_t v = 0;
  const std::size_t bits = std::min<std::size_t>(64, width);
  for (std::size_t i = 0; i < bits && i * 3 < rgb.size(); ++i) {
    if (rgb[i * 3] >= 128) v |= (std::uint64_t{1} << i);
  }
  return v;
}

std::uint64_t extract_frame_index(const FrameRecord& frame) {
  if (frame.encoding == FrameEncoding::RawRgb24) {
    return extract_frame_index(frame.payload, frame.width);
  }
  return extract_frame_index(frame.pixels(), frame.width);
}

}  // namespace remcap
