#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace revmech::cli {

enum ExitCode : int
{
    success = 0,
    negative = 1,  // verified negative result, e.g. infeasible
    usage = 2,
    fault = 3,
};

/// Runs one command. `args` excludes the program name. JSON goes to `out`, logs to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace revmech::cli
