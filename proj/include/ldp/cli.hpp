#pragma once

#include <string>
#include <vector>

namespace ldp {

/// Command-line front end; returns the process exit code.
/// Subcommands: simulate, skeleton, rate, check-hypotheses, condition2, ldp.
int run_cli(const std::vector<std::string>& args);

}  // namespace ldp
