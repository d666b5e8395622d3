// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "remcap/core/command.hpp"

namespace remcap::agent {

struct ScriptedCommand {
  std::uint64_t at_frame = 0;  // applied at the first frame >= at_frame
  ControlCommand command;
  friend bool operator==(const ScriptedCommand&, const ScriptedCommand&) = default;
};

/// One command per line: `<frame_index_at_or_after> <KIND> <value>`; STOP takes
/// no value. Blank lines and `#` comments are skipped. Entries are returned in
/// stable frame order. Throws InvalidArgument naming the line.
std::vector<ScriptedCommand> parse_command_script(std::string_view text);
std::vector<ScriptedCommand> load_command_script(const std::filesystem::path& path);

}  // namespace remcap::agent
