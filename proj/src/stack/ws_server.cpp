// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/stack/ws_server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "remcap/core/clock.hpp"
#include "remcap/core/frame.hpp"
#include "remcap/stack/http_api.hpp"

namespace remcap::stack {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

json ws_message(const std::string& type, json payload) {
  return json{{"type", type}, {"payload", std::move(payload)}};
}

namespace {

Uuid session_field(const json& payload) {
  if (!payload.contains("session_id") || !payload["session_id"].is_string()) {
    throw Error(Errc::MalformedPayload, "session_id missing");
  }
  auto id = Uuid::parse(payload["session_id"].get<std::string>());
  if (!id) throw Error(Errc::UnknownSession, "not a session id");
  return *id;
}

/// Runs blocking requests for one connection in arrival order.
class Worker {
 public:
  Worker() : thread_([this] { run(); }) {}
  ~Worker() {
    {
      std::lock_guard lock(mu_);
      done_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }
  void post(std::function<void()> fn) {
    {
      std::lock_guard lock(mu_);
      tasks_.push_back(std::move(fn));
    }
    cv_.notify_one();
  }

 private:
  void run() {
    for (;;) {
      std::function<void()> fn;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return done_ || !tasks_.empty(); });
        if (tasks_.empty()) return;
        fn = std::move(tasks_.front());
        tasks_.pop_front();
      }
      fn();
    }
  }
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> tasks_;
  bool done_ = false;
  std::thread thread_;
};

}  // namespace

struct WsServer::Impl : std::enable_shared_from_this<WsServer::Impl> {
  class Conn;

  gateway::Gateway& gw;
  Options options;
  asio::io_context ioc;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
  tcp::acceptor acceptor{ioc};
  std::thread io_thread;
  mutable std::mutex mu;
  std::set<std::shared_ptr<Conn>> conns;
  bool stopped = false;

  Impl(gateway::Gateway& g, Options o) : gw(g), options(o) {}

  void accept();
  void drop(const std::shared_ptr<Conn>& c) {
    std::lock_guard lock(mu);
    conns.erase(c);
  }
};

class WsServer::Impl::Conn : public std::enable_shared_from_this<Conn> {
 public:
  Conn(std::shared_ptr<Impl> server, tcp::socket socket)
      : server_(std::move(server)), ws_(std::move(socket)) {}

  ~Conn() { stop_pumps(); }

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->finish();
      self->send_text(ws_message("hello", json{{"server", "remcap"}, {"ts_micros", wall_micros()}}));
      self->read();
    });
  }

  void close() {
    asio::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->closed_) return;
      beast::error_code ec;
      self->ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
      self->ws_.next_layer().close(ec);
    });
  }

  /// Thread-safe. Text messages are never dropped.
  void send_text(const json& msg) { enqueue(Out{msg.dump(), false}); }
  /// Thread-safe. Drops the oldest pending binary message when over the cap.
  void send_binary(std::string bytes) { enqueue(Out{std::move(bytes), true}); }

 private:
  struct Out {
    std::string data;
    bool binary;
  };
  struct Pump {
    std::shared_ptr<std::atomic<bool>> stop = std::make_shared<std::atomic<bool>>(false);
    std::thread thread;
    std::function<void()> release;
  };

  void enqueue(Out out) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), out = std::move(out)]() mutable {
      if (self->closed_) return;
      if (out.binary) {
        std::size_t pending = 0;
        for (const auto& o : self->queue_) pending += o.binary;
        // Never touch the message being written (the front while writing_).
        if (pending >= self->server_->options.max_pending_frames) {
          for (auto it = self->queue_.begin() + (self->writing_ ? 1 : 0); it != self->queue_.end();
               ++it) {
            if (it->binary) {
              self->queue_.erase(it);
              break;
            }
          }
        }
      }
      self->queue_.push_back(std::move(out));
      if (!self->writing_) self->write_next();
    });
  }

  void write_next() {
    if (queue_.empty() || closed_) {
      writing_ = false;
      return;
    }
    writing_ = true;
    ws_.binary(queue_.front().binary);
    ws_.async_write(asio::buffer(queue_.front().data),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->queue_.pop_front();
                      if (ec) {
                        self->writing_ = false;
                        return;
                      }
                      self->write_next();
                    });
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->handle(text);
      self->read();
    });
  }

  void finish() {
    closed_ = true;
    auto self = shared_from_this();
    // Pump threads may hold references; join them off the io thread.
    std::thread([self] {
      self->stop_pumps();
      self->server_->drop(self);
    }).detach();
  }

  void stop_pumps() {
    std::map<std::string, Pump> pumps;
    {
      std::lock_guard lock(pumps_mu_);
      pumps.swap(pumps_);
    }
    for (auto& [key, p] : pumps) end_pump(p);
  }

  static void end_pump(Pump& p) {
    p.stop->store(true);
    if (p.release) p.release();
    if (!p.thread.joinable()) return;
    // A pump may drop the last reference to its own connection.
    if (p.thread.get_id() == std::this_thread::get_id()) {
      p.thread.detach();
    } else {
      p.thread.join();
    }
  }

  void error_reply(const std::string& request, const Error& e, const json& extra = json::object()) {
    json body = error_body(e);
    body["request"] = request;
    for (auto it = extra.begin(); it != extra.end(); ++it) body[it.key()] = it.value();
    send_text(ws_message("error", body));
  }

  void handle(const std::string& text) {
    auto msg = json::parse(text, nullptr, false);
    std::string type;
    if (!msg.is_discarded() && msg.is_object() && msg.contains("type") && msg["type"].is_string()) {
      type = msg["type"].get<std::string>();
    }
    if (type.empty()) {
      return error_reply("", Error(Errc::MalformedPayload, "expected {type, payload}"));
    }
    json payload = msg.value("payload", json::object());
    if (!payload.is_object()) {
      return error_reply(type, Error(Errc::MalformedPayload, "payload must be an object"));
    }
    try {
      if (type == "ping") {
        json p{{"ts_micros", wall_micros()}};
        if (payload.contains("nonce")) p["nonce"] = payload["nonce"];
        send_text(ws_message("pong", p));
      } else if (type == "subscribe_events") {
        subscribe_events(session_field(payload), payload.value("from_seq", std::uint64_t{1}));
      } else if (type == "subscribe_frames") {
        subscribe_frames(session_field(payload), payload.value("annotated", false));
      } else if (type == "unsubscribe") {
        unsubscribe(session_field(payload), payload.value("stream", std::string{}));
      } else if (type == "command") {
        command(payload);
      } else if (type == "marker") {
        marker(payload);
      } else {
        throw Error(Errc::MalformedPayload, "unknown message type " + type);
      }
    } catch (const Error& e) {
      error_reply(type, e);
    } catch (const std::exception& e) {
      error_reply(type, Error(Errc::MalformedPayload, e.what()));
    }
  }

  void add_pump(const std::string& key, Pump pump) {
    std::optional<Pump> old;
    {
      std::lock_guard lock(pumps_mu_);
      if (auto it = pumps_.find(key); it != pumps_.end()) {
        old = std::move(it->second);
        pumps_.erase(it);
      }
      pumps_.emplace(key, std::move(pump));
    }
    if (old) {
      // Joining would block the io thread while the old pump posts; detach the join.
      std::thread([p = std::move(*old)]() mutable { end_pump(p); }).detach();
    }
  }

  void subscribe_events(const Uuid& id, std::uint64_t from_seq) {
    auto& gw = server_->gw;
    gw.session(id);  // UnknownSession
    const std::string channel = gateway::events_channel(id);
    auto sub = gw.subscribe(channel);
    Pump pump;
    pump.release = [&gw, channel, sub] {
      gw.unsubscribe(channel, sub);
      sub->close();
    };
    std::weak_ptr<Conn> weak = shared_from_this();
    pump.thread = std::thread([weak, &gw, id, sub, from_seq, stop = pump.stop] {
      std::uint64_t last = from_seq ? from_seq - 1 : 0;
      // Backlog first; live messages at or below `last` are duplicates.
      for (const auto& e : gw.read_events(id, from_seq)) {
        auto self = weak.lock();
        if (!self || stop->load()) return;
        self->send_text(ws_message("event", to_json(e)));
        last = e.seq;
      }
      while (!stop->load()) {
        auto line = sub->pop_for(std::chrono::milliseconds(100));
        if (!line) {
          if (sub->closed()) return;
          continue;
        }
        auto rec = json::parse(*line, nullptr, false);
        if (rec.is_discarded()) continue;
        const auto seq = rec.value("seq", std::uint64_t{0});
        if (seq <= last) continue;
        last = seq;
        auto self = weak.lock();
        if (!self) return;
        self->send_text(ws_message("event", rec));
      }
    });
    add_pump("events:" + id.str(), std::move(pump));
    send_text(ws_message("subscribed", json{{"session_id", id.str()}, {"stream", "events"}}));
  }

  void subscribe_frames(const Uuid& id, bool annotated) {
    auto& relay = server_->gw.relay();
    auto feed = relay.subscribe_live(id, annotated ? relay::Feed::Annotated : relay::Feed::Raw);
    Pump pump;
    pump.release = [&relay, id, feed] {
      relay.unsubscribe(id, feed);
      feed->close();
    };
    std::weak_ptr<Conn> weak = shared_from_this();
    pump.thread = std::thread([weak, feed, stop = pump.stop] {
      while (!stop->load()) {
        auto frame = feed->pop_for(std::chrono::milliseconds(100));
        if (!frame) {
          if (feed->closed()) return;
          continue;
        }
        auto self = weak.lock();
        if (!self) return;
        Bytes rec = encode_frame_record(*frame);
        self->send_binary(std::string(rec.begin(), rec.end()));
      }
    });
    add_pump("frames:" + id.str(), std::move(pump));
    send_text(ws_message("subscribed", json{{"session_id", id.str()},
                                            {"stream", annotated ? "annotated" : "frames"}}));
  }

  void unsubscribe(const Uuid& id, const std::string& stream) {
    std::vector<Pump> ended;
    {
      std::lock_guard lock(pumps_mu_);
      for (const char* kind : {"events", "frames"}) {
        if (!stream.empty() && stream != kind && !(stream == "annotated" && kind == std::string("frames")))
          continue;
        if (auto it = pumps_.find(std::string(kind) + ":" + id.str()); it != pumps_.end()) {
          ended.push_back(std::move(it->second));
          pumps_.erase(it);
        }
      }
    }
    std::thread([ended = std::move(ended)]() mutable {
      for (auto& p : ended) end_pump(p);
    }).detach();
    send_text(ws_message("unsubscribed", json{{"session_id", id.str()}, {"stream", stream}}));
  }

  void command(const json& payload) {
    const Uuid id = session_field(payload);
    const auto researcher = payload.value("researcher", std::string{});
    ControlCommand cmd = command_from_payload(payload);
    cmd.client_seq = payload.value("client_seq", std::uint64_t{0});
    cmd.issued_ts_micros = payload.value("issued_ts_micros", std::uint64_t{0});
    std::weak_ptr<Conn> weak = shared_from_this();
    auto& gw = server_->gw;
    // Submitting blocks until the agent acks; keep the io thread free.
    worker_.post([weak, &gw, id, researcher, cmd] {
      json reply;
      try {
        auto r = gw.submit_command(id, researcher, cmd);
        json p = to_json(r.applied);
        p["session_id"] = id.str();
        p["round_trip_micros"] = r.round_trip_micros;
        p["event_seq"] = r.event_seq;
        reply = ws_message("command_ack", p);
      } catch (const Error& e) {
        json body = error_body(e);
        body["request"] = "command";
        body["client_seq"] = cmd.client_seq;
        reply = ws_message("error", body);
      }
      if (auto self = weak.lock()) self->send_text(reply);
    });
  }

  void marker(const json& payload) {
    const Uuid id = session_field(payload);
    if (!payload.contains("frame_index") || !payload["frame_index"].is_number_unsigned()) {
      throw Error(Errc::MalformedPayload, "frame_index missing");
    }
    const auto frame = payload["frame_index"].get<std::uint64_t>();
    const auto seq = server_->gw.add_marker(id, frame, payload.value("text", std::string{}));
    send_text(ws_message("marker_ack",
                         json{{"session_id", id.str()}, {"frame_index", frame}, {"seq", seq}}));
  }

  std::shared_ptr<Impl> server_;
  websocket::stream<tcp::socket> ws_;
  beast::flat_buffer buffer_;
  std::deque<Out> queue_;
  bool writing_ = false;
  bool closed_ = false;
  std::mutex pumps_mu_;
  std::map<std::string, Pump> pumps_;
  Worker worker_;
};

void WsServer::Impl::accept() {
  acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    auto conn = std::make_shared<Conn>(self, std::move(socket));
    {
      std::lock_guard lock(self->mu);
      if (self->stopped) return;
      self->conns.insert(conn);
    }
    conn->start();
    self->accept();
  });
}

WsServer::WsServer(gateway::Gateway& gateway) : WsServer(gateway, Options{}) {}

WsServer::WsServer(gateway::Gateway& gateway, Options options)
    : impl_(std::make_shared<Impl>(gateway, options)) {}

WsServer::~WsServer() { stop(); }

std::uint16_t WsServer::listen(const net::Endpoint& ep) {
  auto& im = *impl_;
  tcp::endpoint endpoint(asio::ip::make_address(ep.host), ep.port);
  im.acceptor.open(endpoint.protocol());
  im.acceptor.set_option(asio::socket_base::reuse_address(true));
  im.acceptor.bind(endpoint);
  im.acceptor.listen();
  const auto port = im.acceptor.local_endpoint().port();
  im.work.emplace(im.ioc.get_executor());
  impl_->accept();
  im.io_thread = std::thread([&im] { im.ioc.run(); });
  return port;
}

void WsServer::stop() {
  auto& im = *impl_;
  std::set<std::shared_ptr<Impl::Conn>> conns;
  {
    std::lock_guard lock(im.mu);
    if (im.stopped) return;
    im.stopped = true;
    conns = im.conns;
  }
  asio::post(im.ioc, [&im] {
    beast::error_code ec;
    im.acceptor.close(ec);
  });
  for (auto& c : conns) c->close();
  // Give connections a moment to observe the shutdown, then stop the loop.
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
  while (connections() > 0 && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  im.work.reset();
  im.ioc.stop();
  if (im.io_thread.joinable()) im.io_thread.join();
  std::lock_guard lock(im.mu);
  im.conns.clear();
}

std::size_t WsServer::connections() const {
  std::lock_guard lock(impl_->mu);
  return impl_->conns.size();
}

}  // namespace remcap::stack
