#include "cli/app.hpp"

#include <functional>
#include <map>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "vmdkit/error.hpp"

namespace vmdkit::cli {
namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return kExitConfig;
    case ErrorKind::InvalidInput:
    case ErrorKind::DegenerateInput:
    case ErrorKind::DataError: return kExitData;
    case ErrorKind::NumericFailure:
    case ErrorKind::TrainingFailure: return kExitNumeric;
  }
  return kExitData;
}

struct Subcommand {
  const char* name;
  const char* help;
  void (*fn)(const RunContext&);
};

constexpr Subcommand kCommands[] = {
    {"gen", "Generate a reproducible synthetic graph dataset", cmd_gen},
    {"decompose", "Decompose series with the iterative or the unfolded engine", cmd_decompose},
    {"train-uvmd", "Train the unfolded decomposer", cmd_train_uvmd},
    {"train-forecast", "Train the graph forecaster on raw or decomposed features", cmd_train_forecast},
    {"eval", "Score a trained forecaster on the test windows", cmd_eval},
    {"bench", "Time the iterative and unfolded engines", cmd_bench},
    {"ablate", "Run the shared/per-mode bandwidth, window-length and K x depth grid", cmd_ablate},
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"vmdkit: variational mode decomposition, its unfolded network and a graph forecaster", "vmdkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "vmdkit-out";
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool force = false;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides the config)");
  app.add_option("--threads", threads, "Worker threads; 0 uses every core")->capture_default_str();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_flag("--force", force, "Overwrite existing outputs");

  // Per-command shortcuts that override single config fields.
  std::map<std::string, std::string> overrides;
  const Subcommand* chosen = nullptr;
  for (const auto& c : kCommands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    sub->callback([&chosen, &c] { chosen = &c; });
    auto field = [&, sub](const char* flag, const char* key, const char* help) {
      sub->add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides[key] = v; },
                                            help);
    };
    const std::string name = c.name;
    if (name == "decompose") {
      field("--input", "input", "Series CSV");
      field("--engine", "engine", "iterative or unfolded");
      field("--params", "params", "Trained UVMD parameter file");
    } else if (name == "train-uvmd") {
      field("--input", "input", "Series CSV");
    } else if (name == "train-forecast" || name == "eval") {
      field("--input", "input", "Series CSV");
      field("--edges", "edges", "Edge list CSV");
      field("--uvmd-params", "uvmd_params", "Trained UVMD parameter file");
      if (name == "eval") field("--model", "forecaster", "Trained forecaster file");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "vmdkit: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    RunContext ctx;
    if (!config_path.empty()) {
      ctx.config = load_config(config_path);
      ctx.config_dir = std::filesystem::path(config_path).parent_path();
    }
    // Flag values are relative to the working directory, not the config file.
    for (const auto& [key, value] : overrides) {
      ctx.config[key] = std::filesystem::absolute(value).string();
      if (key == "engine") ctx.config[key] = value;
    }
    if (seed_opt->count() > 0) ctx.seed_flag = seed;
    ctx.threads = threads;
    ctx.out_dir = out_dir;
    ctx.force = force;
    ctx.log = &out;
    chosen->fn(ctx);
    return kExitOk;
  } catch (const Error& e) {
    err << "vmdkit: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    err << "vmdkit: out of memory\n";
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "vmdkit: data error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace vmdkit::cli
