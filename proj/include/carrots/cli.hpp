#pragma once

// Batch front end. `run` is the whole program minus process plumbing, so
// tests can drive it in-process.

#include "carrots/scalar.hpp"

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace carrots::cli {

enum ExitCode : int { ok = 0, usage = 1, numeric_failure = 2, violation = 3 };

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "-1", "0+0i", "-0.1+0.7i", "0.5i", "1e-3-2i".
Complex parse_complex(std::string_view text);

}  // namespace carrots::cli
