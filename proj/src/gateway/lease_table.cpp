// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/gateway/lease_table.hpp"

namespace remcap::gateway {

SceneBusyError::SceneBusyError(const SceneLease& current)
    : Error(Errc::SceneBusy, "scene " + current.scene_id + " held by " + current.holder +
                                 " until " + std::to_string(current.expires_at_micros())),
      current_(current) {}

SceneLease LeaseTable::acquire(const std::string& researcher, const std::string& scene_id,
                               std::uint32_t ttl_seconds) {
  if (researcher.empty()) throw Error(Errc::InvalidArgument, "researcher: must not be empty");
  std::lock_guard lock(mu_);
  const auto now = clock_.now_micros();
  auto it = leases_.find(scene_id);
  if (it != leases_.end() && !it->second.expired_at(now) && it->second.holder != researcher) {
    throw SceneBusyError(it->second);
  }
  SceneLease lease{scene_id, researcher, now, ttl_seconds};
  leases_[scene_id] = lease;
  return lease;
}

void LeaseTable::release(const std::string& scene_id, const std::string& researcher) {
  std::lock_guard lock(mu_);
  auto it = leases_.find(scene_id);
  if (it == leases_.end() || it->second.holder != researcher ||
      it->second.expired_at(clock_.now_micros())) {
    throw Error(Errc::LeaseInvalid, researcher + " holds no lease on " + scene_id);
  }
  leases_.erase(it);
}

SceneLease LeaseTable::validate(const std::string& scene_id, const std::string& researcher) const {
  std::lock_guard lock(mu_);
  auto it = leases_.find(scene_id);
  if (it == leases_.end() || it->second.holder != researcher) {
    throw Error(Errc::LeaseInvalid, researcher + " holds no lease on " + scene_id);
  }
  if (it->second.expired_at(clock_.now_micros())) {
    throw Error(Errc::LeaseInvalid, "lease on " + scene_id + " expired at " +
                                        std::to_string(it->second.expires_at_micros()));
  }
  return it->second;
}

std::optional<SceneLease> LeaseTable::current(const std::string& scene_id) const {
  std::lock_guard lock(mu_);
  auto it = leases_.find(scene_id);
  if (it == leases_.end() || it->second.expired_at(clock_.now_micros())) return std::nullopt;
  return it->second;
}

}  // namespace remcap::gateway
