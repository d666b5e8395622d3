// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/core/crc32.hpp"

#include <zlib.h>

#include <algorithm>
#include <limits>

namespace remcap {

void Crc32::update(std::span<const std::uint8_t> bytes) noexcept {
  // zlib takes uInt lengths; feed large buffers in chunks.
  constexpr std::size_t kChunk = std::numeric_limits<uInt>::max();
  const std::uint8_t* p = bytes.data();
  std::size_t left = bytes.size();
  uLong crc = crc_;
  while (left > 0) {
    auto n = std::min(left, kChunk);
    crc = ::crc32(crc, p, static_cast<uInt>(n));
    p += n;
    left -= n;
  }
  crc_ = static_cast<std::uint32_t>(crc);
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept {
  Crc32 c;
  c.update(bytes);
  return c.value();
}

}  // namespace remcap
