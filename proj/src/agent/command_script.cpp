// SPDX-FileCopyrightText: Copyright (c) 2026 The remcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "remcap/agent/command_script.hpp"

#include <algorithm>
#include <sstream>

#include "remcap/core/error.hpp"
#include "remcap/core/segment.hpp"

namespace remcap::agent {

std::vector<ScriptedCommand> parse_command_script(std::string_view text) {
  std::vector<ScriptedCommand> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string frame_tok, kind_tok;
    if (!(fields >> frame_tok)) continue;
    auto fail = [&](const std::string& what) {
      throw Error(Errc::InvalidArgument, "script line " + std::to_string(line_no) + ": " + what);
    };
    ScriptedCommand sc;
    try {
      std::size_t used = 0;
      sc.at_frame = std::stoull(frame_tok, &used);
      if (used != frame_tok.size()) fail("bad frame index '" + frame_tok + "'");
    } catch (const std::logic_error&) {
      fail("bad frame index '" + frame_tok + "'");
    }
    if (!(fields >> kind_tok)) fail("missing command kind");
    auto kind = parse_command_kind(kind_tok);
    if (!kind) fail("unknown command kind '" + kind_tok + "'");
    sc.command.kind = *kind;
    if (*kind != CommandKind::Stop) {
      if (!(fields >> sc.command.value)) fail("missing or bad value");
    }
    std::string extra;
    if (fields >> extra) fail("unexpected trailing '" + extra + "'");
    out.push_back(sc);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.at_frame < b.at_frame; });
  return out;
}

std::vector<ScriptedCommand> load_command_script(const std::filesystem::path& path) {
  return parse_command_script(read_text_file(path));
}

}  // namespace remcap::agent
