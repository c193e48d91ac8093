#pragma once

namespace orlicz::cli {

// Parses argv, dispatches to the library, writes report.csv / report.txt /
// curves.csv into the output directory. Returns the process exit code:
// 0 complete (or PASS), 1 configuration error, 2 scan without a passing
// row, 3 inconclusive or failed classification gate, 4 numeric failure.
// Diagnostics go to stderr, one line each.
int run(int argc, const char* const* argv);

}  // namespace orlicz::cli
