// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/agent/token_bucket.hpp"

#include <algorithm>
#include <cmath>

namespace remcap::agent {

TokenBucket::TokenBucket(double rate, double burst, std::uint64_t now)
    : rate_(std::max(0.0, rate)), burst_(std::max(0.0, burst)), tokens_(burst_), last_(now) {}

void TokenBucket::refill(std::uint64_t now) {
  if (now <= last_) return;
  tokens_ = std::min(burst_, tokens_ + rate_ * static_cast<double>(now - last_) / 1e6);
  last_ = now;
}

double TokenBucket::tokens(std::uint64_t now) {
  refill(now);
  return tokens_;
}

std::optional<std::uint64_t> TokenBucket::ready_at(double bytes, std::uint64_t now) {
  refill(now);
  if (tokens_ >= bytes) return now;
  if (rate_ <= 0.0 || bytes > burst_) return std::nullopt;
  const double wait_us = std::ceil((bytes - tokens_) / rate_ * 1e6);
  return now + static_cast<std::uint64_t>(wait_us);
}

bool TokenBucket::try_consume(double bytes, std::uint64_t now) {
  refill(now);
  // Absorb floating-point residue from ready_at's rounding.
  if (tokens_ + 1e-6 * std::max(1.0, bytes) < bytes) return false;
  tokens_ = std::max(0.0, tokens_ - bytes);
  return true;
}

}  // namespace remcap::agent
