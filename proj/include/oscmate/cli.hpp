#pragma once

#include <oscmate/error.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace oscmate {

/// Exit status for a library error: 2 domain, 3 argument/expression, 4 I/O.
int exit_code_for(ErrorCode code);

/// Runs one command line (without the program name). Payload goes to `out`
/// unless --out is given; diagnostics go to `err` as `error[CODE]: message`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oscmate
