// SPDX-License-Identifier: Apache-2.0
//
// Machine-readable report envelope emitted by the command-line tool.
#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace claser {

inline constexpr const char* tool_version = "0.1.0";

// FNV-1a over the raw bytes, rendered as 16 hex digits. Used to fingerprint
// command inputs in reports.
std::string digest_bytes(const std::string& bytes);
std::string digest_file(const std::string& path);

// {"command": ..., "inputs_digest": ..., "tool_version": ..., "payload": ...}
nlohmann::json make_report(const std::string& command,
                           const std::string& inputs_digest,
                           nlohmann::json payload);

}  // namespace claser
