#pragma once

#include "cli/context.hpp"

namespace vmdkit::cli {

void cmd_gen(const RunContext& ctx);
void cmd_decompose(const RunContext& ctx);
void cmd_train_uvmd(const RunContext& ctx);
void cmd_train_forecast(const RunContext& ctx);
void cmd_eval(const RunContext& ctx);
void cmd_bench(const RunContext& ctx);
void cmd_ablate(const RunContext& ctx);

}  // namespace vmdkit::cli
