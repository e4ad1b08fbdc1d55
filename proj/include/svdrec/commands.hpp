#pragma once

#include "svdrec/run_config.hpp"

namespace svdrec {

// Pipeline stages behind the CLI subcommands. Each stage locks the output
// directory while it runs, writes its artifacts there, and throws on any
// failure (the caller turns that into a nonzero exit).
void cmd_prepare(const RunConfig& cfg);
void cmd_embed(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_eval(const RunConfig& cfg);
void cmd_run(const RunConfig& cfg);  // prepare, embed, train, eval in order

}  // namespace svdrec
