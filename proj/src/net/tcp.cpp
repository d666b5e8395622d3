// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/net/tcp.hpp"

#include <boost/asio.hpp>

#include <sys/socket.h>

#include <atomic>
#include <charconv>
#include <cstring>

#include "remcap/core/error.hpp"

namespace remcap::net {

namespace asio = boost::asio;
using asio::ip::tcp;

std::optional<Endpoint> parse_endpoint(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) return std::nullopt;
  unsigned port = 0;
  auto tail = text.substr(colon + 1);
  auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), port);
  if (ec != std::errc() || p != tail.data() + tail.size() || port > 65535) return std::nullopt;
  return Endpoint{text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

struct TcpStream::Impl {
  asio::io_context io;
  tcp::socket socket{io};
  std::string pending;  // bytes read past the last line break
};

TcpStream::TcpStream() : impl_(std::make_unique<Impl>()) {}
TcpStream::~TcpStream() = default;
TcpStream::TcpStream(TcpStream&&) noexcept = default;
TcpStream& TcpStream::operator=(TcpStream&&) noexcept = default;

TcpStream TcpStream::connect(const Endpoint& ep) {
  TcpStream s;
  boost::system::error_code ec;
  tcp::resolver resolver(s.impl_->io);
  auto results = resolver.resolve(ep.host, std::to_string(ep.port), ec);
  if (!ec) asio::connect(s.impl_->socket, results, ec);
  if (ec) throw Error(Errc::IoError, "connect " + ep.str() + ": " + ec.message());
  s.set_no_delay(true);
  return s;
}

bool TcpStream::is_open() const { return impl_ && impl_->socket.is_open(); }

bool TcpStream::write_all(std::span<const std::uint8_t> bytes) {
  boost::system::error_code ec;
  asio::write(impl_->socket, asio::buffer(bytes.data(), bytes.size()), ec);
  return !ec;
}

bool TcpStream::write_all(const std::string& text) {
  return write_all(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::size_t TcpStream::read_exact(std::span<std::uint8_t> out) {
  std::size_t got = 0;
  if (!impl_->pending.empty()) {
    got = std::min(out.size(), impl_->pending.size());
    std::memcpy(out.data(), impl_->pending.data(), got);
    impl_->pending.erase(0, got);
  }
  if (got == out.size()) return got;
  boost::system::error_code ec;
  got += asio::read(impl_->socket, asio::buffer(out.data() + got, out.size() - got), ec);
  return got;
}

std::optional<std::string> TcpStream::read_line(std::size_t max_len) {
  auto& buf = impl_->pending;
  for (;;) {
    auto nl = buf.find('\n');
    if (nl != std::string::npos) {
      std::string line = buf.substr(0, nl);
      buf.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (buf.size() > max_len) return std::nullopt;
    char chunk[4096];
    boost::system::error_code ec;
    auto n = impl_->socket.read_some(asio::buffer(chunk), ec);
    if (ec || n == 0) return std::nullopt;
    buf.append(chunk, n);
  }
}

void TcpStream::shutdown() {
  boost::system::error_code ec;
  impl_->socket.shutdown(tcp::socket::shutdown_both, ec);
}

void TcpStream::close() {
  boost::system::error_code ec;
  impl_->socket.close(ec);
}

void TcpStream::set_no_delay(bool on) {
  boost::system::error_code ec;
  impl_->socket.set_option(tcp::no_delay(on), ec);
}

bool LineChannel::send(const std::string& line) {
  std::lock_guard lock(write_mu_);
  return stream_.write_all(line + "\n");
}

struct TcpListener::Impl {
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::atomic<bool> closed{false};
};

TcpListener::TcpListener(const Endpoint& ep) : impl_(std::make_unique<Impl>()) {
  boost::system::error_code ec;
  auto addr = asio::ip::make_address(ep.host, ec);
  if (ec) throw Error(Errc::IoError, "bad listen address " + ep.host);
  tcp::endpoint endpoint(addr, ep.port);
  impl_->acceptor.open(endpoint.protocol(), ec);
  if (!ec) impl_->acceptor.set_option(tcp::acceptor::reuse_address(true), ec);
  if (!ec) impl_->acceptor.bind(endpoint, ec);
  if (!ec) impl_->acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw Error(Errc::IoError, "listen " + ep.str() + ": " + ec.message());
}

TcpListener::~TcpListener() {
  close();
  boost::system::error_code ec;
  impl_->acceptor.close(ec);
}

std::uint16_t TcpListener::port() const { return impl_->acceptor.local_endpoint().port(); }

std::optional<TcpStream> TcpListener::accept() {
  while (!impl_->closed.load()) {
    TcpStream s;
    boost::system::error_code ec;
    impl_->acceptor.accept(s.impl_->socket, ec);
    if (!ec) {
      s.set_no_delay(true);
      return s;
    }
    if (impl_->closed.load() || ec == asio::error::bad_descriptor ||
        ec == asio::error::operation_aborted) {
      break;
    }
  }
  return std::nullopt;
}

void TcpListener::close() {
  if (impl_->closed.exchange(true)) return;
  // shutdown() on the listening fd wakes a thread blocked in accept(); the
  // descriptor itself is released by the destructor.
  ::shutdown(impl_->acceptor.native_handle(), SHUT_RDWR);
}

}  // namespace remcap::net
