#pragma once

#include <cstdint>
#include <ostream>

#include "config.hpp"

namespace eigenwave::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitIo = 3, kExitNumerical = 4 };

struct RunOptions {
  int threads = 1;
  std::uint64_t seed = 1;
};

// Each command writes into [output] dir; nothing is left behind on failure.
void cmd_synth(const ConfigFile& cfg, const RunOptions& opts, std::ostream& out);
void cmd_decompose(const ConfigFile& cfg, const RunOptions& opts, std::ostream& out);
void cmd_forward(const ConfigFile& cfg, const RunOptions& opts, std::ostream& out);
void cmd_invert(const ConfigFile& cfg, const RunOptions& opts, std::ostream& out);
void cmd_dump_basis(const ConfigFile& cfg, const RunOptions& opts, std::ostream& out);

/// Full command line: `eigenwave <command> --config <path> [--threads k] [--seed n]`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace eigenwave::cli
