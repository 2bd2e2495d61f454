#ifndef GHT_CLI_HPP
#define GHT_CLI_HPP

#include <ostream>

namespace ght {

// Command-line entry point. Subcommands: solve, patch, mesh, nets, evolve, verify, xval.
// Returns 0 on success, 1 on a numeric failure (including a failing verify suite), 2 on a usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ght

#endif
