#pragma once

#include <iosfwd>

namespace pbsat {

// Command-line entry point. Exit codes: 10 satisfiable, 20 unsatisfiable,
// 0 unknown or success, 1 error.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace pbsat
