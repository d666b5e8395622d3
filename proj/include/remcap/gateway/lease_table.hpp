// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "remcap/core/clock.hpp"
#include "remcap/core/error.hpp"
#include "remcap/core/lease.hpp"

namespace remcap::gateway {

inline constexpr std::uint32_t kDefaultLeaseTtlSeconds = 300;

/// SceneBusy carrying the current holder.
class SceneBusyError : public Error {
 public:
  explicit SceneBusyError(const SceneLease& current);
  const SceneLease& current() const noexcept { return current_; }

 private:
  SceneLease current_;
};

/// Exclusive, expiring scene leases. All operations are atomic with respect to
/// each other; expiry is judged against the injected clock.
class LeaseTable {
 public:
  explicit LeaseTable(Clock& clock) : clock_(clock) {}

  /// Grants or renews (same holder). Throws SceneBusyError.
  SceneLease acquire(const std::string& researcher, const std::string& scene_id,
                     std::uint32_t ttl_seconds);
  /// Throws LeaseInvalid unless `researcher` holds an unexpired lease.
  void release(const std::string& scene_id, const std::string& researcher);
  /// Throws LeaseInvalid unless `researcher` holds an unexpired lease.
  SceneLease validate(const std::string& scene_id, const std::string& researcher) const;
  /// Unexpired lease for the scene, if any.
  std::optional<SceneLease> current(const std::string& scene_id) const;

  std::uint64_t now_micros() const { return clock_.now_micros(); }

 private:
  Clock& clock_;
  mutable std::mutex mu_;
  std::map<std::string, SceneLease> leases_;
};

}  // namespace remcap::gateway
