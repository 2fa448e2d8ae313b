#pragma once

// Command-line entry point, factored out of main() so tests can drive it
// in-process. Exit codes: 0 success, 1 usage error, 2 data error,
// 3 failed predictive check.

#include <iosfwd>

namespace mcma::cli {

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

} // namespace mcma::cli
