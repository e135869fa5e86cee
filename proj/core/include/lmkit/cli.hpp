#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lmkit::cli {

// Dispatches one CLI invocation (argv without the program name).
// Subcommands: fit, predict, anova, stepwise, plot, diagnose.
// Returns 0 on success; domain errors print a one-line message to err and
// return 1; usage errors return the parser's nonzero code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lmkit::cli
