#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dlau {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInputFile = 3;
inline constexpr int kExitSimulation = 4;

/// Runs one subcommand (gen, run, sim, sweep, profile, resources). `args`
/// excludes the program name. Data goes to files or `out`, diagnostics to
/// `err`; the return value is the process exit code.
int execute_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dlau
