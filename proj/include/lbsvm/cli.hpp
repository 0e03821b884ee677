#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lbsvm::cli {

/// Entry point shared by the `lbsvm` executable and the tests. args[0] is the
/// program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lbsvm::cli
