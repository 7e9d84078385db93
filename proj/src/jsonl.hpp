// Copyright 2026 The vgskit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-record helpers shared by the manifest readers. Internal header.

#ifndef VGSKIT_SRC_JSONL_HPP_
#define VGSKIT_SRC_JSONL_HPP_

#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "vgskit/error.hpp"

namespace vgs::jsonl {

using Json = nlohmann::json;

// Calls fn(record, line_number) for every non-blank line. Each line must be
// a JSON object.
template <typename Fn>
void ForEachRecord(std::string_view text, ErrorCode bad_record, Fn&& fn) {
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json rec;
    try {
      rec = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(bad_record, "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.is_object()) {
      throw Error(bad_record, "line " + std::to_string(lineno) + ": not an object");
    }
    fn(rec, lineno);
  }
}

inline std::string RequireString(const Json& rec, const char* key,
                                 std::size_t line, ErrorCode bad_record) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    throw Error(bad_record, "line " + std::to_string(line) +
                                ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

inline double RequireNumber(const Json& rec, const char* key, std::size_t line,
                            ErrorCode bad_record) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_number()) {
    throw Error(bad_record, "line " + std::to_string(line) +
                                ": missing numeric field '" + key + "'");
  }
  return it->get<double>();
}

inline std::optional<std::string> OptionalString(const Json& rec,
                                                 const char* key,
                                                 std::size_t line,
                                                 ErrorCode bad_record) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(bad_record, "line " + std::to_string(line) + ": field '" + key +
                                "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace vgs::jsonl

#endif  // VGSKIT_SRC_JSONL_HPP_
