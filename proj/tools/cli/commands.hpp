#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "run_config.hpp"

namespace mixcsc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitInternal = 3,
};

inline constexpr std::string_view kSubcommands[] = {"correct", "eval", "sweep",
                                                    "synth", "train-lm"};

// Settings understood by a subcommand, with defaults. Empty for unknown names.
std::vector<OptionSpec> options_for(std::string_view subcommand);

// Runs the tool in-process. `args` excludes the program name. "-" as a path
// means `in` (inputs) or `out` (outputs).
int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env);

}  // namespace mixcsc::cli
