#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace glorenz::cli {

/// Exit codes: 0 success, 1 domain/runtime failure, 2 configuration or usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace glorenz::cli
