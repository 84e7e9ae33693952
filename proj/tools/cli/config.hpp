#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "vmdkit/error.hpp"

namespace vmdkit::cli {

using nlohmann::json;

/// Read-only view of one JSON object inside a config file. Every error names
/// the dotted path of the offending field, e.g. "train.max_epochs".
class ConfigNode {
 public:
  ConfigNode(const json* node, std::string path) : node_(node), path_(std::move(path)) {}

  bool has(const std::string& key) const { return node_ && node_->contains(key); }
  std::string path_of(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  /// A missing child behaves like an empty object.
  ConfigNode child(const std::string& key) const;

  template <class T>
  T get(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    return convert<T>(key);
  }

  template <class T>
  T require(const std::string& key) const {
    if (!has(key)) throw InvalidConfig(path_of(key) + ": required field is missing");
    return convert<T>(key);
  }

  /// Rejects keys outside `allowed` so typos do not silently fall back to defaults.
  void allow_only(std::initializer_list<const char*> allowed) const;

 private:
  template <class T>
  T convert(const std::string& key) const {
    const json& v = node_->at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(key, "expected true or false");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(key, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
          fail(key, "expected a non-negative integer");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(key, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(key, "expected a string");
    }
    try {
      return v.get<T>();
    } catch (const json::exception& e) {
      fail(key, e.what());
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw InvalidConfig(path_of(key) + ": " + what);
  }

  const json* node_;
  std::string path_;
};

/// Parses a config file; syntax errors become InvalidConfig.
json load_config(const std::filesystem::path& path);

}  // namespace vmdkit::cli
