// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/core/segment.hpp"

#include <cerrno>
#include <cstring>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "remcap/core/bytes.hpp"
#include "remcap/core/crc32.hpp"
#include "remcap/core/error.hpp"

namespace remcap {

namespace {

constexpr std::uint8_t kSegmentMagic[4] = {'E', 'X', 'S', 'G'};
constexpr std::uint8_t kSegmentVersion = 0x01;

void check_envelope(ByteView bytes) {
  if (bytes.size() < 4) throw Error(Errc::TruncatedRecord, "segment: shorter than magic");
  if (std::memcmp(bytes.data(), kSegmentMagic, 4) != 0) {
    throw Error(Errc::BadMagic, "segment magic: expected \"EXSG\"");
  }
  if (bytes.size() < kSegmentHeaderSize + kSegmentTrailerSize) {
    throw Error(Errc::TruncatedRecord, "segment: missing version or checksum trailer");
  }
  if (bytes[4] != kSegmentVersion) {
    throw Error(Errc::BadVersion, "segment version: unsupported " + std::to_string(bytes[4]));
  }
}

}  // namespace

std::string segment_file_name(std::uint64_t first_frame_index) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%08llu.seg", static_cast<unsigned long long>(first_frame_index));
  return buf;
}

SegmentWriter::SegmentWriter(const std::filesystem::path& path, std::uint64_t first_frame_index)
    : path_(path) {
  info_.file = path.filename().string();
  info_.first_frame_index = first_frame_index;
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) {
    throw Error(Errc::IoError, path.string() + ": " + std::strerror(errno));
  }
  const std::uint8_t header[kSegmentHeaderSize] = {kSegmentMagic[0], kSegmentMagic[1],
                                                   kSegmentMagic[2], kSegmentMagic[3],
                                                   kSegmentVersion};
  write(header);
}

SegmentWriter::~SegmentWriter() {
  if (file_) {
    try {
      finish();
    } catch (...) {
    }
  }
}

void SegmentWriter::write(ByteView bytes) {
  if (std::fwrite(bytes.data(), 1, bytes.size(), file_) != bytes.size()) {
    throw Error(Errc::IoError, path_.string() + ": short write");
  }
  crc_.update(bytes);
}

void SegmentWriter::append(ByteView encoded_record) {
  write(encoded_record);
  ++info_.frame_count;
}

SegmentInfo SegmentWriter::finish() {
  if (!file_) return info_;
  std::uint8_t trailer[4];
  le::store(trailer, crc_.value());
  if (std::fwrite(trailer, 1, 4, file_) != 4 || std::fflush(file_) != 0) {
    std::fclose(file_);
    file_ = nullptr;
    throw Error(Errc::IoError, path_.string() + ": failed to write trailer");
  }
  std::fclose(file_);
  file_ = nullptr;
  info_.crc32 = crc_.value();
  return info_;
}

Bytes encode_segment(const std::vector<FrameRecord>& frames) {
  Bytes out{kSegmentMagic[0], kSegmentMagic[1], kSegmentMagic[2], kSegmentMagic[3], kSegmentVersion};
  for (const auto& f : frames) append_frame_record(out, f);
  le::put(out, crc32(out));
  return out;
}

std::uint32_t verify_segment_checksum(ByteView bytes) {
  check_envelope(bytes);
  const auto body = bytes.first(bytes.size() - kSegmentTrailerSize);
  const auto stored = le::load<std::uint32_t>(bytes.data() + body.size());
  const auto actual = crc32(body);
  if (stored != actual) {
    throw Error(Errc::ChecksumMismatch, "segment crc32: stored " + std::to_string(stored) +
                                            ", computed " + std::to_string(actual));
  }
  return stored;
}

DecodedSegment decode_segment(ByteView bytes) {
  DecodedSegment seg;
  seg.crc32 = verify_segment_checksum(bytes);
  auto body = bytes.subspan(kSegmentHeaderSize,
                            bytes.size() - kSegmentHeaderSize - kSegmentTrailerSize);
  while (!body.empty()) {
    auto [frame, consumed] = decode_frame_prefix(body);
    seg.frames.push_back(std::move(frame));
    body = body.subspan(consumed);
  }
  return seg;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, path.string() + ": cannot open");
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  Bytes out(size);
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(size));
  if (!in) throw Error(Errc::IoError, path.string() + ": short read");
  return out;
}

void write_file(const std::filesystem::path& path, ByteView bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoError, path.string() + ": write failed");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text_file(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace remcap

namespace remcap {

SegmentReader::SegmentReader(const std::filesystem::path& path) : name_(path.filename().string()) {
  file_ = std::fopen(path.c_str(), "rb");
  if (!file_) throw Error(Errc::IoError, path.string() + ": cannot open");
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(Errc::IoError, path.string() + ": " + ec.message());
  std::uint8_t head[kSegmentHeaderSize] = {};
  const std::size_t got = std::fread(head, 1, sizeof head, file_);
  if (got < 4) throw Error(Errc::TruncatedRecord, name_ + ": shorter than magic");
  if (std::memcmp(head, kSegmentMagic, 4) != 0)
    throw Error(Errc::BadMagic, name_ + ": segment magic: expected \"EXSG\"");
  if (size < kSegmentHeaderSize + kSegmentTrailerSize)
    throw Error(Errc::TruncatedRecord, name_ + ": missing version or checksum trailer");
  if (head[4] != kSegmentVersion)
    throw Error(Errc::BadVersion, name_ + ": segment version: unsupported " + std::to_string(head[4]));
  crc_.update(ByteView(head, sizeof head));
  pos_ = kSegmentHeaderSize;
  body_end_ = size - kSegmentTrailerSize;
  std::uint8_t trailer[kSegmentTrailerSize];
  if (fseeko(file_, static_cast<off_t>(body_end_), SEEK_SET) != 0 ||
      std::fread(trailer, 1, sizeof trailer, file_) != sizeof trailer ||
      fseeko(file_, static_cast<off_t>(pos_), SEEK_SET) != 0)
    throw Error(Errc::IoError, name_ + ": cannot read trailer");
  stored_crc_ = le::load<std::uint32_t>(trailer);
}

SegmentReader::~SegmentReader() {
  if (file_) std::fclose(file_);
}

std::optional<SegmentReader::Item> SegmentReader::next() {
  if (done_) return std::nullopt;
  if (pos_ == body_end_) {
    done_ = true;
    if (crc_.value() != stored_crc_) {
      throw Error(Errc::ChecksumMismatch, name_ + ": crc32 stored " + std::to_string(stored_crc_) +
                                              ", computed " + std::to_string(crc_.value()));
    }
    return std::nullopt;
  }
  Item item;
  if (body_end_ - pos_ < kFrameHeaderSize)
    throw Error(Errc::TruncatedRecord, name_ + ": record header cut at offset " + std::to_string(pos_));
  item.encoded.resize(kFrameHeaderSize);
  if (std::fread(item.encoded.data(), 1, kFrameHeaderSize, file_) != kFrameHeaderSize)
    throw Error(Errc::IoError, name_ + ": short read");
  const std::uint64_t payload = peek_payload_length(item.encoded);
  if (body_end_ - pos_ - kFrameHeaderSize < payload)
    throw Error(Errc::TruncatedRecord, name_ + ": record payload cut at offset " + std::to_string(pos_));
  item.encoded.resize(kFrameHeaderSize + payload);
  if (payload != 0 &&
      std::fread(item.encoded.data() + kFrameHeaderSize, 1, payload, file_) != payload)
    throw Error(Errc::IoError, name_ + ": short read");
  pos_ += item.encoded.size();
  crc_.update(item.encoded);
  item.frame = decode_frame_record(item.encoded);
  return item;
}

std::uint32_t verify_segment_file(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw Error(Errc::IoError, path.string() + ": cannot open");
  Bytes buf(1 << 20);
  Crc32 crc;
  // Keep the last 4 bytes out of the running crc; they are the trailer.
  std::uint8_t tail[kSegmentTrailerSize];
  std::size_t tail_len = 0;
  std::uint8_t head[kSegmentHeaderSize];
  std::size_t head_len = 0;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) {
    for (std::size_t i = 0; i < n && head_len < kSegmentHeaderSize; ++i) head[head_len++] = buf[i];
    // Combine pending tail with new data, hold back the final 4 bytes.
    Bytes chunk(tail, tail + tail_len);
    chunk.insert(chunk.end(), buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n));
    tail_len = std::min(chunk.size(), kSegmentTrailerSize);
    std::memcpy(tail, chunk.data() + chunk.size() - tail_len, tail_len);
    crc.update(ByteView(chunk.data(), chunk.size() - tail_len));
  }
  std::fclose(f);
  Bytes envelope(head, head + head_len);
  if (head_len == kSegmentHeaderSize) envelope.insert(envelope.end(), tail, tail + tail_len);
  check_envelope(envelope);
  const auto stored = le::load<std::uint32_t>(tail);
  if (stored != crc.value()) {
    throw Error(Errc::ChecksumMismatch, path.filename().string() + ": crc32 stored " +
                                            std::to_string(stored) + ", computed " +
                                            std::to_string(crc.value()));
  }
  return stored;
}

}  // namespace remcap
