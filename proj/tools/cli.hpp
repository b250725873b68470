#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "slitcarpet/carpet.hpp"

namespace slitcarpet::cli {

enum ExitCode : int { kSuccess = 0, kAssertionFailed = 1, kUsageError = 2 };

/// Runs one subcommand. argv[0] is the program name. Reports go to `out`
/// (or to --out), diagnostics to `err`.
int cli_dispatch(std::span<const std::string> argv, std::ostream& out, std::ostream& err);

/// "x,y[,L|R][,F|B]" with dyadic or decimal coordinates.
CarpetPoint parse_point(const std::string& text);

}  // namespace slitcarpet::cli
