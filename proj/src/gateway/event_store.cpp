// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/gateway/event_store.hpp"

#include <fstream>

#include "remcap/core/clock.hpp"
#include "remcap/core/error.hpp"

namespace remcap::gateway {

Subscription Broker::subscribe(const std::string& channel) {
  auto sub = std::make_shared<DropOldestQueue<std::string>>(capacity_);
  std::lock_guard lock(mu_);
  subs_[channel].push_back(sub);
  return sub;
}

void Broker::unsubscribe(const std::string& channel, const Subscription& sub) {
  sub->close();
  std::lock_guard lock(mu_);
  auto it = subs_.find(channel);
  if (it != subs_.end()) std::erase(it->second, sub);
}

std::size_t Broker::publish(const std::string& channel, const std::string& message) {
  std::lock_guard lock(mu_);
  auto it = subs_.find(channel);
  if (it == subs_.end()) return 0;
  std::erase_if(it->second, [](const Subscription& s) { return s->closed(); });
  for (auto& s : it->second) s->push(message);
  return it->second.size();
}

void Broker::close_all() {
  std::lock_guard lock(mu_);
  for (auto& [_, subs] : subs_)
    for (auto& s : subs) s->close();
  subs_.clear();
}

std::string events_channel(const Uuid& session_id) {
  return "session." + session_id.str() + ".events";
}

struct EventStore::Log {
  std::mutex mu;
  std::FILE* file = nullptr;
  std::vector<EventRecord> records;
  ~Log() {
    if (file) std::fclose(file);
  }
};

EventStore::EventStore(std::filesystem::path dir, Broker& broker)
    : dir_(std::move(dir)), broker_(broker) {
  std::filesystem::create_directories(dir_);
}

EventStore::~EventStore() = default;

std::filesystem::path EventStore::path_for(const Uuid& session_id) const {
  return dir_ / (session_id.str() + ".jsonl");
}

void EventStore::create(const Uuid& session_id) {
  auto log = std::make_shared<Log>();
  const auto path = path_for(session_id);
  log->file = std::fopen(path.c_str(), "ab");
  if (!log->file) throw Error(Errc::IoError, path.string() + ": cannot open");
  std::lock_guard lock(mu_);
  logs_.try_emplace(session_id, std::move(log));
}

bool EventStore::contains(const Uuid& session_id) const {
  std::lock_guard lock(mu_);
  return logs_.count(session_id) != 0;
}

std::shared_ptr<EventStore::Log> EventStore::log(const Uuid& session_id) const {
  std::lock_guard lock(mu_);
  auto it = logs_.find(session_id);
  if (it == logs_.end()) throw Error(Errc::UnknownSession, "session " + session_id.str());
  return it->second;
}

std::uint64_t EventStore::append(const Uuid& session_id, EventKind kind,
                                 std::uint64_t frame_index, const std::string& payload_json) {
  auto l = log(session_id);
  std::string payload;
  try {
    payload = canonical_json(payload_json);
  } catch (const Error&) {
    throw Error(Errc::MalformedPayload, "payload is not JSON: " + payload_json.substr(0, 80));
  }
  EventRecord rec{session_id, 0, kind, frame_index, wall_micros(), std::move(payload)};
  std::string line;
  {
    std::lock_guard lock(l->mu);
    rec.seq = l->records.size() + 1;
    line = to_json(rec).dump();
    line += '\n';
    if (std::fwrite(line.data(), 1, line.size(), l->file) != line.size() ||
        std::fflush(l->file) != 0) {
      throw Error(Errc::IoError, "event log write failed for " + session_id.str());
    }
    l->records.push_back(rec);
    // Publishing under the log lock keeps channel order equal to seq order.
    line.pop_back();
    broker_.publish(events_channel(session_id), line);
  }
  return rec.seq;
}

std::vector<EventRecord> EventStore::read(const Uuid& session_id, std::uint64_t from_seq) const {
  auto l = log(session_id);
  std::lock_guard lock(l->mu);
  const std::size_t start = from_seq == 0 ? 0 : from_seq - 1;
  if (start >= l->records.size()) return {};
  return {l->records.begin() + static_cast<std::ptrdiff_t>(start), l->records.end()};
}

std::vector<EventRecord> EventStore::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, path.string() + ": cannot open");
  std::vector<EventRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::MalformedPayload, path.string() + ": bad line");
    out.push_back(event_from_json(j));
  }
  return out;
}

}  // namespace remcap::gateway
