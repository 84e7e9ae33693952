#include "cli/config.hpp"

#include <algorithm>
#include <fstream>

namespace vmdkit::cli {

ConfigNode ConfigNode::child(const std::string& key) const {
  if (!has(key)) return ConfigNode(nullptr, path_of(key));
  const json& v = node_->at(key);
  if (!v.is_object()) throw InvalidConfig(path_of(key) + ": expected an object");
  return ConfigNode(&v, path_of(key));
}

void ConfigNode::allow_only(std::initializer_list<const char*> allowed) const {
  if (!node_) return;
  for (const auto& [key, value] : node_->items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw InvalidConfig(path_of(key) + ": unknown field");
  }
}

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file '" + path.string() + "'");
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw InvalidConfig("config file '" + path.string() + "' must hold a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw InvalidConfig("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace vmdkit::cli
