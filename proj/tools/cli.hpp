#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fdas::cli {

/// Runs the fdas command line. Returns 0 on success, 1 on a module error and
/// 2 when the arguments or input files fail validation.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fdas::cli
