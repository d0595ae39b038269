#pragma once

namespace contstab::cli {

/// Full command-line front end.  Returns the process exit code:
///   0 success, 1 verification failure, 2 invalid input, 3 numerical failure.
int run(int argc, const char* const* argv);

} // namespace contstab::cli
