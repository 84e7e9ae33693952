#include "cli/context.hpp"

#include <fstream>

#include "vmdkit/parallel.hpp"

namespace vmdkit::cli {

std::uint64_t RunContext::seed() const {
  if (seed_flag) return *seed_flag;
  return root().get<std::uint64_t>("seed", 0);
}

std::size_t RunContext::resolved_threads() const { return resolve_threads(threads); }

std::filesystem::path RunContext::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || config_dir.empty()) return p;
  return config_dir / p;
}

void RunContext::claim(const std::vector<std::string>& names) const {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  if (force) return;
  for (const auto& name : names) {
    const auto p = output(name);
    if (std::filesystem::exists(p)) {
      throw InvalidConfig("refusing to overwrite '" + p.string() + "'; pass --force to replace it");
    }
  }
}

void RunContext::note(const std::string& line) const {
  if (log) *log << line << '\n';
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed while writing '" + path.string() + "'");
}

}  // namespace vmdkit::cli
