// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/core/error.hpp"

namespace remcap {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::BadMagic: return "BadMagic";
    case Errc::BadVersion: return "BadVersion";
    case Errc::TruncatedRecord: return "TruncatedRecord";
    case Errc::PayloadMismatch: return "PayloadMismatch";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::UnsortedEvents: return "UnsortedEvents";
    case Errc::SessionNotRunning: return "SessionNotRunning";
    case Errc::RelayDisconnected: return "RelayDisconnected";
    case Errc::GatewayUnreachable: return "GatewayUnreachable";
    case Errc::SceneBusy: return "SceneBusy";
    case Errc::UnknownScene: return "UnknownScene";
    case Errc::LeaseInvalid: return "LeaseInvalid";
    case Errc::DeviceBusy: return "DeviceBusy";
    case Errc::DeviceOffline: return "DeviceOffline";
    case Errc::UnknownDevice: return "UnknownDevice";
    case Errc::SessionNotLive: return "SessionNotLive";
    case Errc::AgentTimeout: return "AgentTimeout";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::MalformedPayload: return "MalformedPayload";
    case Errc::NonMonotoneIndex: return "NonMonotoneIndex";
    case Errc::DecodeError: return "DecodeError";
    case Errc::SessionNotStopped: return "SessionNotStopped";
    case Errc::MissingSegment: return "MissingSegment";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::NotAContainer: return "NotAContainer";
    case Errc::ManifestParseError: return "ManifestParseError";
    case Errc::FrameOutOfRange: return "FrameOutOfRange";
    case Errc::BoxOutOfBounds: return "BoxOutOfBounds";
    case Errc::StackUnreachable: return "StackUnreachable";
    case Errc::ProcessNotFound: return "ProcessNotFound";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace remcap
