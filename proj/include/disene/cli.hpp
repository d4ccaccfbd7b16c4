#pragma once

#include <iosfwd>

namespace disene {

// Entry point of the `disene` tool. Returns the process exit code: 0 when
// every requested run completed, nonzero on usage errors or failures.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace disene
