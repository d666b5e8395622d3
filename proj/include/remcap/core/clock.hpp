// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>

namespace remcap {

std::uint64_t wall_micros() noexcept;

/// Monotonic time source plus sleep, so pacing logic can run against virtual time.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::uint64_t now_micros() = 0;
  virtual void sleep_until(std::uint64_t micros) = 0;
};

class SteadyClock final : public Clock {
 public:
  std::uint64_t now_micros() override;
  void sleep_until(std::uint64_t micros) override;
};

/// Microseconds since the epoch. Used where timestamps leave the process.
class WallClock final : public Clock {
 public:
  std::uint64_t now_micros() override { return wall_micros(); }
  void sleep_until(std::uint64_t micros) override;
};

/// Time only moves when someone sleeps or calls advance().
class ManualClock final : public Clock {
 public:
  explicit ManualClock(std::uint64_t start = 0) : now_(start) {}
  std::uint64_t now_micros() override { return now_.load(); }
  void sleep_until(std::uint64_t micros) override;
  void advance(std::uint64_t micros) { now_.fetch_add(micros); }

 private:
  std::atomic<std::uint64_t> now_;
};

}  // namespace remcap
