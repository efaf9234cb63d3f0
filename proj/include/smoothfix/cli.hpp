#pragma once

#include <iosfwd>

namespace smoothfix {

inline constexpr const char* kVersion = "0.1.0";

// Runs the smoothfix command line. Exit codes: 0 success, 1 validation
// error (bad flags, bad config, missing seed), 2 runtime error.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smoothfix
