#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace epsc {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitUsage = 64;

// args excludes the program name. Reports go to --report PATH, or to out when no path is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace epsc
