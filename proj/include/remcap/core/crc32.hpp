// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

namespace remcap {

/// Streaming CRC-32 (IEEE 802.3 polynomial, as used by zip/png).
class Crc32 {
 public:
  void update(std::span<const std::uint8_t> bytes) noexcept;
  std::uint32_t value() const noexcept { return crc_; }

 private:
  std::uint32_t crc_ = 0;
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace remcap
