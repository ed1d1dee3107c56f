#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nvcpt::cli {

inline constexpr const char* kConfigEnv = "NVCPT_CONFIG";

enum ExitCode { kOk = 0, kInputError = 2, kNotConverged = 3, kInvariant = 4 };

/// Full command line (argv[0] included). Never throws; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nvcpt::cli
