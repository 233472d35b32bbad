#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace padic::cli {

/// Runs one subcommand. Exit status 0 on success, 2 on hypothesis
/// violations, 1 on other errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace padic::cli
