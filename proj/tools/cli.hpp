#ifndef SPINQUANT_TOOLS_CLI_HPP
#define SPINQUANT_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace spinq::cli {

inline constexpr int kSchemaVersion = 1;

enum Exit : int { Ok = 0, Usage = 1, Unavailable = 2 };

/// Runs one command line (without the program name). Output is deterministic.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace spinq::cli

#endif
