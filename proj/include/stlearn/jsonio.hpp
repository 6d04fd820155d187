#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace stlearn {

using Json = nlohmann::json;

/// Strict-schema guard: every key in `j` must appear in `allowed`.
/// Unknown keys are errors (naming the key), so typos in config files
/// fail loudly instead of silently using a default.
inline void require_known_keys(const Json& j, const std::string& context,
                               std::initializer_list<const char*> allowed) {
  if (!j.is_object()) {
    throw std::runtime_error(context + ": expected a JSON object");
  }
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::runtime_error(context + ": unknown key \"" + item.key() + "\"");
    }
  }
}

inline const Json& require_field(const Json& j, const std::string& context,
                                 const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw std::runtime_error(context + ": missing key \"" + std::string(key) + "\"");
  }
  return *it;
}

}  // namespace stlearn
