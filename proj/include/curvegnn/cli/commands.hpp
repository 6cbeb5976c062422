#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curvegnn::cli {

/// Entry point behind the curvegnn executable; args exclude the program
/// name. Returns 0 on success, 1 on invalid input or configuration, 2 on a
/// numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curvegnn::cli
