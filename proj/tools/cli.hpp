#pragma once

#include <ostream>

namespace padsph::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2, kDomain = 3 };

/// Runs one `padsph` invocation; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace padsph::cli
