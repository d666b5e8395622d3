// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <csignal>
#include <functional>
#include <thread>

namespace remcap::tools {

/// Blocks SIGINT and SIGTERM in every thread started afterwards and runs
/// `on_signal` on a dedicated thread when one arrives. Call before spawning threads.
inline void on_termination(std::function<void()> on_signal) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  std::thread([set, on_signal = std::move(on_signal)] {
    int sig = 0;
    sigwait(&set, &sig);
    on_signal();
  }).detach();
}

}  // namespace remcap::tools
