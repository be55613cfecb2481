#pragma once

#include <iosfwd>

namespace msmbias::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kDomainError = 2;

// Entry point of the `msmbias` command; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace msmbias::cli
