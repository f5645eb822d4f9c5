#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gsr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs one subcommand. argv[0] is the program name. Exit status 0 on
/// success, 1 on a validation or usage error, 2 on an I/O error.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

/// Convenience overload; `args` excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace gsr::cli
