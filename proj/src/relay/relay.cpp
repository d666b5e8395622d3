// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/relay/relay.hpp"

#include <array>

#include "remcap/core/clock.hpp"
#include "remcap/core/crc32.hpp"

namespace remcap::relay {

using nlohmann::json;

double IngestStats::achieved_fps() const noexcept {
  if (delivered < 2 || last_arrival_micros <= first_arrival_micros) return 0.0;
  return static_cast<double>(delivered - 1) * 1e6 /
         static_cast<double>(last_arrival_micros - first_arrival_micros);
}

json to_json(const IngestStats& s) {
  return {{"session_id", s.session_id.str()},
          {"captured_hint", s.captured_hint},
          {"delivered", s.delivered},
          {"bytes_in", s.bytes_in},
          {"first_arrival_ts_micros", s.first_arrival_micros},
          {"last_arrival_ts_micros", s.last_arrival_micros},
          {"achieved_fps", s.achieved_fps()}};
}

struct Relay::Channel {
  Uuid id;
  std::filesystem::path dir;
  mutable std::mutex mu;
  IngestStats stats;
  std::uint8_t fps = 30;
  bool ingesting = false;
  bool ended = false;
  std::vector<FrameFeed> raw;
  std::vector<FrameFeed> annotated;
  std::vector<std::unique_ptr<inference::ProcessorTask>> processors;
};

Relay::Relay(RelayHooks hooks, RelayOptions options)
    : hooks_(std::move(hooks)), options_(options) {}

Relay::~Relay() { stop(); }

void Relay::expect_session(const Uuid& id, const std::filesystem::path& segments_dir,
                           std::uint8_t fps) {
  auto ch = std::make_shared<Channel>();
  ch->id = id;
  ch->fps = fps;
  ch->dir = segments_dir;
  ch->stats.session_id = id;
  std::lock_guard lock(mu_);
  channels_.try_emplace(id, std::move(ch));
}

std::shared_ptr<Relay::Channel> Relay::channel(const Uuid& id) const {
  std::lock_guard lock(mu_);
  auto it = channels_.find(id);
  return it == channels_.end() ? nullptr : it->second;
}

std::uint16_t Relay::listen(const net::Endpoint& ep) {
  listener_ = std::make_unique<net::TcpListener>(ep);
  accept_thread_ = std::thread([this] {
    while (auto stream = listener_->accept()) {
      if (stopping_.load()) break;
      auto conn = std::make_shared<net::TcpStream>(std::move(*stream));
      std::lock_guard lock(conn_mu_);
      connection_threads_.emplace_back([this, conn] { ingest(*conn); });
    }
  });
  return listener_->port();
}

void Relay::stop() {
  if (stopping_.exchange(true)) return;
  if (listener_) listener_->close();
  if (accept_thread_.joinable()) accept_thread_.join();
  {
    std::lock_guard lock(mu_);
    for (auto* s : active_streams_) s->shutdown();
  }
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(conn_mu_);
    threads.swap(connection_threads_);
  }
  for (auto& t : threads)
    if (t.joinable()) t.join();
}

void Relay::fan_out(Channel& ch, const FrameRecord& frame) {
  std::lock_guard lock(ch.mu);
  std::erase_if(ch.raw, [](const FrameFeed& f) { return f->closed(); });
  for (auto& feed : ch.raw) feed->push(frame);
  for (auto& task : ch.processors) task->offer(frame);
}

IngestResult Relay::ingest(net::TcpStream& stream) {
  IngestResult res;
  auto fail = [&](Errc code, std::string detail) {
    res.clean = false;
    res.error = code;
    res.detail = std::move(detail);
  };

  std::array<std::uint8_t, kSessionHeaderSize> head{};
  if (stream.read_exact(head) != head.size()) {
    fail(Errc::TruncatedRecord, "connection closed before the session header");
    return res;
  }
  SessionHeader header;
  try {
    header = decode_session_header(head);
  } catch (const Error& e) {
    fail(e.code(), e.detail());
    stream.shutdown();
    return res;
  }
  res.stats.session_id = header.session_id;
  auto ch = channel(header.session_id);
  if (!ch) {
    fail(Errc::UnknownSession, "session " + header.session_id.str() + " is not expected");
    stream.shutdown();
    return res;
  }
  {
    std::lock_guard lock(ch->mu);
    if (ch->ingesting || ch->ended) {
      fail(Errc::InvalidArgument, "session " + header.session_id.str() + " already ingested");
      stream.shutdown();
      return res;
    }
    ch->ingesting = true;
    ch->fps = header.fps;
  }
  {
    std::lock_guard lock(mu_);
    active_streams_.insert(&stream);
  }
  ++total_ingests_;

  std::error_code ec;
  std::filesystem::create_directories(ch->dir, ec);
  Crc32 shadow;
  std::unique_ptr<SegmentWriter> segment;
  std::optional<std::uint64_t> previous;
  Bytes record;

  try {
    for (;;) {
      record.resize(kFrameHeaderSize);
      const std::size_t got = stream.read_exact(std::span(record.data(), kFrameHeaderSize));
      if (got == 0) break;  // clean end of stream
      if (got < kFrameHeaderSize) {
        fail(Errc::TruncatedRecord, "stream ended inside a record header");
        break;
      }
      std::uint32_t payload_len = 0;
      try {
        payload_len = peek_payload_length(record);
      } catch (const Error& e) {
        fail(Errc::DecodeError, e.what());
        break;
      }
      if (payload_len > options_.max_payload) {
        fail(Errc::DecodeError, "payload_len " + std::to_string(payload_len) + " exceeds limit");
        break;
      }
      record.resize(kFrameHeaderSize + payload_len);
      if (stream.read_exact(std::span(record.data() + kFrameHeaderSize, payload_len)) !=
          payload_len) {
        fail(Errc::TruncatedRecord, "stream ended inside a record payload");
        break;
      }
      const std::uint64_t arrival = wall_micros();
      FrameRecord frame;
      try {
        frame = decode_frame_record(record);
      } catch (const Error& e) {
        fail(Errc::DecodeError, e.what());
        break;
      }
      if (frame.session_id != header.session_id) {
        fail(Errc::DecodeError, "record for session " + frame.session_id.str() +
                                    " on stream of " + header.session_id.str());
        break;
      }
      if (previous && frame.frame_index <= *previous) {
        fail(Errc::NonMonotoneIndex, "frame_index " + std::to_string(frame.frame_index) +
                                         " after " + std::to_string(*previous));
        if (hooks_.event) {
          hooks_.event(header.session_id, EventKind::Lifecycle, *previous,
                       json{{"event", "non_monotone_index"},
                            {"frame", frame.frame_index},
                            {"previous", *previous}}
                           .dump());
        }
        break;
      }
      previous = frame.frame_index;

      shadow.update(record);
      if (!segment) {
        segment = std::make_unique<SegmentWriter>(ch->dir / segment_file_name(frame.frame_index),
                                                  frame.frame_index);
      }
      segment->append(record);
      if (segment->frame_count() >= options_.segment_frames) {
        res.segments.push_back(segment->finish());
        segment.reset();
      }
      {
        std::lock_guard lock(ch->mu);
        auto& s = ch->stats;
        if (s.delivered == 0) s.first_arrival_micros = arrival;
        s.last_arrival_micros = arrival;
        ++s.delivered;
        s.bytes_in += record.size();
        s.captured_hint = frame.frame_index + 1;
      }
      fan_out(*ch, frame);
    }
  } catch (const Error& e) {
    fail(e.code(), e.detail());
  }
  if (res.error) stream.shutdown();
  if (segment) res.segments.push_back(segment->finish());
  res.shadow_crc = shadow.value();
  {
    std::lock_guard lock(mu_);
    active_streams_.erase(&stream);
  }

  // Drain processors before reporting so their events precede the close.
  std::vector<std::unique_ptr<inference::ProcessorTask>> tasks;
  {
    std::lock_guard lock(ch->mu);
    tasks.swap(ch->processors);
    ch->ingesting = false;
    ch->ended = true;
  }
  for (auto& t : tasks) t->close();
  {
    std::lock_guard lock(ch->mu);
    for (auto& f : ch->raw) f->close();
    for (auto& f : ch->annotated) f->close();
    res.stats = ch->stats;
  }
  if (hooks_.closed) hooks_.closed(res);
  return res;
}

FrameFeed Relay::subscribe_live(const Uuid& id, Feed feed) {
  auto ch = channel(id);
  if (!ch) throw Error(Errc::UnknownSession, "session " + id.str());
  auto q = std::make_shared<DropOldestQueue<FrameRecord>>(options_.viewer_queue);
  std::lock_guard lock(ch->mu);
  if (ch->ended) {
    q->close();
    return q;
  }
  (feed == Feed::Raw ? ch->raw : ch->annotated).push_back(q);
  return q;
}

void Relay::unsubscribe(const Uuid& id, const FrameFeed& feed) {
  feed->close();
  if (auto ch = channel(id)) {
    std::lock_guard lock(ch->mu);
    std::erase(ch->raw, feed);
    std::erase(ch->annotated, feed);
  }
}

void Relay::attach_processor(const Uuid& id,
                             std::shared_ptr<inference::FrameProcessor> processor) {
  auto ch = channel(id);
  if (!ch) throw Error(Errc::UnknownSession, "session " + id.str());
  std::weak_ptr<Channel> weak = ch;
  inference::ProcessorTask::Sinks sinks;
  sinks.event = [this, id](EventKind kind, std::uint64_t frame, const std::string& payload) {
    if (hooks_.event) hooks_.event(id, kind, frame, payload);
  };
  sinks.frame = [weak](const FrameRecord& frame) {
    auto c = weak.lock();
    if (!c) return;
    std::lock_guard lock(c->mu);
    std::erase_if(c->annotated, [](const FrameFeed& f) { return f->closed(); });
    for (auto& feed : c->annotated) feed->push(frame);
  };
  std::lock_guard lock(ch->mu);
  if (ch->ended) throw Error(Errc::SessionNotLive, "session " + id.str() + " has ended");
  const auto deadline = std::chrono::microseconds(1'000'000 / (ch->fps ? ch->fps : 30));
  ch->processors.push_back(std::make_unique<inference::ProcessorTask>(
      std::move(processor), std::move(sinks), deadline, options_.processor_queue));
}

std::vector<std::string> Relay::processors(const Uuid& id) const {
  auto ch = channel(id);
  if (!ch) throw Error(Errc::UnknownSession, "session " + id.str());
  std::lock_guard lock(ch->mu);
  std::vector<std::string> out;
  for (auto& t : ch->processors) out.push_back(t->name());
  return out;
}

IngestStats Relay::stats(const Uuid& id) const {
  auto ch = channel(id);
  if (!ch) throw Error(Errc::UnknownSession, "session " + id.str());
  std::lock_guard lock(ch->mu);
  return ch->stats;
}

bool Relay::ingest_active(const Uuid& id) const {
  auto ch = channel(id);
  if (!ch) return false;
  std::lock_guard lock(ch->mu);
  return ch->ingesting;
}

std::size_t Relay::active_ingests() const {
  std::lock_guard lock(mu_);
  return active_streams_.size();
}

}  // namespace remcap::relay
