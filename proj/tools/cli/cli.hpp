#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace obkit::cli {

/// Exit codes: 0 success, 1 input error, 2 internal error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace obkit::cli
