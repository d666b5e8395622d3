// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

// Thin HTTP and WebSocket clients for driving a running stack from tests.
#pragma once

#include <httplib.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "remcap/net/tcp.hpp"

namespace remcap::testing {

struct HttpReply {
  int status = 0;
  nlohmann::json body;
  std::string raw;
};

class HttpJson {
 public:
  explicit HttpJson(const net::Endpoint& ep) : client_(ep.host, ep.port) {
    client_.set_read_timeout(30, 0);
    client_.set_tcp_nodelay(true);
  }
  HttpReply get(const std::string& path) { return wrap(client_.Get(path)); }
  HttpReply del(const std::string& path) { return wrap(client_.Delete(path)); }
  HttpReply post(const std::string& path, const nlohmann::json& body) {
    return wrap(client_.Post(path, body.dump(), "application/json"));
  }

 private:
  static HttpReply wrap(const httplib::Result& r) {
    if (!r) throw std::runtime_error("http request failed: " + httplib::to_string(r.error()));
    HttpReply out{r->status, nullptr, r->body};
    if (r->get_header_value("Content-Type") == "application/json") {
      out.body = nlohmann::json::parse(r->body);
    }
    return out;
  }
  httplib::Client client_;
};

/// Synchronous WebSocket client with a reader thread buffering messages.
class WsClient {
 public:
  struct Message {
    bool binary = false;
    std::string data;
    nlohmann::json json() const { return nlohmann::json::parse(data); }
  };

  explicit WsClient(const net::Endpoint& ep) : ws_(ioc_) {
    namespace asio = boost::asio;
    asio::ip::tcp::resolver resolver(ioc_);
    asio::connect(ws_.next_layer(), resolver.resolve(ep.host, std::to_string(ep.port)));
    ws_.handshake(ep.host, "/");
    reader_ = std::thread([this] { read_loop(); });
  }
  ~WsClient() {
    boost::system::error_code ec;
    ws_.next_layer().shutdown(boost::asio::ip::tcp::socket::shutdown_both, ec);
    if (reader_.joinable()) reader_.join();
    ws_.next_layer().close(ec);
  }

  void send(const std::string& type, const nlohmann::json& payload) {
    std::lock_guard lock(write_mu_);
    ws_.text(true);
    ws_.write(boost::asio::buffer(nlohmann::json{{"type", type}, {"payload", payload}}.dump()));
  }
  void send_raw(const std::string& text) {
    std::lock_guard lock(write_mu_);
    ws_.text(true);
    ws_.write(boost::asio::buffer(text));
  }

  std::optional<Message> next(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return !inbox_.empty() || closed_; });
    if (inbox_.empty()) return std::nullopt;
    auto m = std::move(inbox_.front());
    inbox_.pop_front();
    return m;
  }
  /// Next text message of the given type; other messages are discarded.
  std::optional<nlohmann::json> next_of(const std::string& type, std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      auto m = next(left);
      if (!m) return std::nullopt;
      if (m->binary) continue;
      auto j = m->json();
      if (j.value("type", "") == type) return j;
    }
    return std::nullopt;
  }

 private:
  void read_loop() {
    for (;;) {
      boost::beast::flat_buffer buf;
      boost::system::error_code ec;
      ws_.read(buf, ec);
      std::lock_guard lock(mu_);
      if (ec) {
        closed_ = true;
        cv_.notify_all();
        return;
      }
      inbox_.push_back({!ws_.got_text(), boost::beast::buffers_to_string(buf.data())});
      cv_.notify_all();
    }
  }

  boost::asio::io_context ioc_;
  boost::beast::websocket::stream<boost::asio::ip::tcp::socket> ws_;
  std::mutex write_mu_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Message> inbox_;
  bool closed_ = false;
  std::thread reader_;
};

}  // namespace remcap::testing
