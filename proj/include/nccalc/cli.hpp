#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nccalc::cli {

enum Status { kPass = 0, kCheckFailure = 1, kInputError = 2, kInconsistency = 3 };

/// Runs one command line (without the program name). Reports go to `out`,
/// error messages to `err`.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nccalc::cli
