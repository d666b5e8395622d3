// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace remcap {

enum class Errc {
  // frame / container formats
  BadMagic,
  BadVersion,
  TruncatedRecord,
  PayloadMismatch,
  OutOfRange,
  UnsortedEvents,
  // device agent
  SessionNotRunning,
  RelayDisconnected,
  GatewayUnreachable,
  // gateway
  SceneBusy,
  UnknownScene,
  LeaseInvalid,
  DeviceBusy,
  DeviceOffline,
  UnknownDevice,
  SessionNotLive,
  AgentTimeout,
  UnknownSession,
  MalformedPayload,
  // relay
  NonMonotoneIndex,
  DecodeError,
  // packer
  SessionNotStopped,
  MissingSegment,
  ChecksumMismatch,
  NotAContainer,
  ManifestParseError,
  FrameOutOfRange,
  // inference
  BoxOutOfBounds,
  // bench
  StackUnreachable,
  ProcessNotFound,
  // generic
  InvalidArgument,
  IoError,
};

std::string_view errc_name(Errc code) noexcept;

/// Error raised by every remcap module. `what()` is "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace remcap
