#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entwit::cli {

/// Runs one command; `args` excludes the program name. Returns the process
/// exit code: 0 ok, 1 check failure or runtime error, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entwit::cli
