// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

namespace remcap::agent {

/// Byte budget: tokens accrue at `rate` per second up to `burst`. Starts full.
/// Time is passed in explicitly (microseconds) so callers choose the clock.
class TokenBucket {
 public:
  TokenBucket(double rate_bytes_per_sec, double burst_bytes, std::uint64_t now_micros);

  /// Earliest time at which `bytes` tokens are available, or nullopt if never
  /// (zero rate, or request larger than the burst).
  std::optional<std::uint64_t> ready_at(double bytes, std::uint64_t now_micros);
  /// Takes `bytes` if available at `now_micros`.
  bool try_consume(double bytes, std::uint64_t now_micros);

  double tokens(std::uint64_t now_micros);
  double rate() const noexcept { return rate_; }
  double burst() const noexcept { return burst_; }

 private:
  void refill(std::uint64_t now_micros);

  double rate_;
  double burst_;
  double tokens_;
  std::uint64_t last_;
};

}  // namespace remcap::agent
