#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace vmdkit::cli {

/// Everything a subcommand needs from the global flags.
struct RunContext {
  json config = json::object();  // the --config file with flag overrides folded in
  std::filesystem::path config_dir;
  std::filesystem::path out_dir = "vmdkit-out";
  std::optional<std::uint64_t> seed_flag;
  std::size_t threads = 0;  // 0 = all cores
  bool force = false;
  std::ostream* log = nullptr;

  ConfigNode root() const { return ConfigNode(&config, ""); }
  std::uint64_t seed() const;
  std::size_t resolved_threads() const;

  /// Relative paths inside a config file are taken relative to that file.
  std::filesystem::path resolve(const std::string& path) const;
  std::filesystem::path output(const std::string& name) const { return out_dir / name; }

  /// Creates the output directory and refuses to proceed if any of `names`
  /// already exists there, unless --force was given. Called before any work.
  void claim(const std::vector<std::string>& names) const;

  void note(const std::string& line) const;
};

/// Writes `j` with a trailing newline.
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace vmdkit::cli
