// SPDX-License-Identifier: Apache-2.0
#include "claser/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "claser/errors.hpp"

namespace claser {

std::string digest_bytes(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return digest_bytes(body.str());
}

nlohmann::json make_report(const std::string& command,
                           const std::string& inputs_digest,
                           nlohmann::json payload) {
  return nlohmann::json{{"command", command},
                        {"inputs_digest", inputs_digest},
                        {"tool_version", tool_version},
                        {"payload", std::move(payload)}};
}

}  // namespace claser
