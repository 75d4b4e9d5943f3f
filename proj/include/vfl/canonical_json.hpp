// Copyright 2026 The vfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <system_error>

#include "json.hpp"

namespace vfl {

using Json = nlohmann::json;

// Shortest decimal string that parses back to exactly `v`. Zero of either
// sign is written as "0".
inline std::string format_double(double v) {
  if (!std::isfinite(v)) {
    throw std::domain_error("canonical json: non-finite number");
  }
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) {
    throw std::runtime_error("canonical json: to_chars failed");
  }
  return std::string(buf, res.ptr);
}

namespace detail {

inline void write_canonical(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::null:
      out += "null";
      return;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      return;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      return;
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case Json::value_t::string:
      out += j.dump();
      return;
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& item : j) {
        if (!first) out.push_back(',');
        first = false;
        write_canonical(item, out);
      }
      out.push_back(']');
      return;
    }
    case Json::value_t::object: {
      // nlohmann's object_t is a std::map, so iteration is already in
      // bytewise key order.
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        out += Json(it.key()).dump();
        out.push_back(':');
        write_canonical(it.value(), out);
      }
      out.push_back('}');
      return;
    }
    case Json::value_t::binary:
    case Json::value_t::discarded:
      break;
  }
  throw std::domain_error("canonical json: unsupported value type");
}

}  // namespace detail

// Canonical form: sorted keys, no whitespace, shortest round-trip numbers.
// Byte arrays are carried as lowercase hex strings by the callers.
inline std::string canonical_dump(const Json& j) {
  std::string out;
  detail::write_canonical(j, out);
  return out;
}

}  // namespace vfl
