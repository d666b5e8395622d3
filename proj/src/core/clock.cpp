// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/core/clock.hpp"

#include <chrono>
#include <thread>

namespace remcap {

std::uint64_t wall_micros() noexcept {
  using namespace std::chrono;
  return static_cast<std::uint64_t>(
      duration_cast<microseconds>(system_clock::now().time_since_epoch()).count());
}

std::uint64_t SteadyClock::now_micros() {
  using namespace std::chrono;
  return static_cast<std::uint64_t>(
      duration_cast<microseconds>(steady_clock::now().time_since_epoch()).count());
}

void SteadyClock::sleep_until(std::uint64_t micros) {
  auto now = now_micros();
  if (micros > now) {
    std::this_thread::sleep_for(std::chrono::microseconds(micros - now));
  }
}

void WallClock::sleep_until(std::uint64_t micros) {
  auto now = wall_micros();
  if (micros > now) {
    std::this_thread::sleep_for(std::chrono::microseconds(micros - now));
  }
}

void ManualClock::sleep_until(std::uint64_t micros) {
  auto cur = now_.load();
  while (cur < micros && !now_.compare_exchange_weak(cur, micros)) {
  }
}

}  // namespace remcap
