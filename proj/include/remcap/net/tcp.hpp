// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>

namespace remcap::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  std::string str() const { return host + ":" + std::to_string(port); }
};

/// Parses "HOST:PORT"; returns nullopt on malformed input.
std::optional<Endpoint> parse_endpoint(const std::string& text);

/// Blocking TCP byte stream. Reads and writes may run on different threads.
class TcpStream {
 public:
  TcpStream();
  ~TcpStream();
  TcpStream(TcpStream&&) noexcept;
  TcpStream& operator=(TcpStream&&) noexcept;

  /// Throws IoError when the peer is unreachable.
  static TcpStream connect(const Endpoint& ep);

  bool is_open() const;
  /// Returns false once the connection is broken.
  bool write_all(std::span<const std::uint8_t> bytes);
  bool write_all(const std::string& text);
  /// Reads exactly `out.size()` bytes; returns the number read before EOF/error.
  std::size_t read_exact(std::span<std::uint8_t> out);
  /// Reads up to and excluding '\n'. nullopt on EOF or error.
  std::optional<std::string> read_line(std::size_t max_len = 1 << 20);
  /// Unblocks pending reads on other threads.
  void shutdown();
  void close();
  void set_no_delay(bool on);

 private:
  friend class TcpListener;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Line-framed JSON-ish messaging on top of TcpStream with a write lock.
class LineChannel {
 public:
  explicit LineChannel(TcpStream stream) : stream_(std::move(stream)) {}

  bool send(const std::string& line);
  std::optional<std::string> receive() { return stream_.read_line(); }
  void shutdown() { stream_.shutdown(); }
  TcpStream& stream() { return stream_; }

 private:
  std::mutex write_mu_;
  TcpStream stream_;
};

class TcpListener {
 public:
  /// Port 0 picks an ephemeral port; see port().
  explicit TcpListener(const Endpoint& ep);
  ~TcpListener();

  std::uint16_t port() const;
  /// nullopt once close() was called.
  std::optional<TcpStream> accept();
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace remcap::net
