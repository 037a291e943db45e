#pragma once

#include <iosfwd>

namespace macroflow::cli {

// Exit statuses of the command-line tool.
enum Status : int {
  ok = 0,
  failure = 1,
  usage_error = 2,
  corpus_error = 3,
  empty_input = 4,
  mismatch = 5,
};

// Runs one subcommand. Diagnostics go to `err` as a single line
// `error: code=<name> message="<text>"`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace macroflow::cli
