#pragma once

#include <iosfwd>

namespace sfwm {

/// Entry point of the `sfwm` command-line tool. Returns the process exit
/// code: 0 success, 1 config error, 2 domain error, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sfwm
