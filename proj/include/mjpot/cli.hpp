#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mjpot::cli {

/// Dispatches one subcommand. Returns 0 on success, 1 when a computation or
/// validation check fails, 2 on input or usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace mjpot::cli
