#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hisim {

/// Runs one CLI invocation; args[0] is the program name.
/// Exit codes: 0 success, 1 usage error, 2 domain error, 3 I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace hisim
