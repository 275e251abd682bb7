#ifndef RUELLE_CLI_APP_HPP
#define RUELLE_CLI_APP_HPP

namespace ruelle {

// Full command-line entry point (subcommands: analyze, scan, verify).
// Exposed as a library call so tests can drive it in-process.
// Exit codes: 0 ok, 1 invalid configuration, 2 hypothesis violation,
// 3 degeneracy-only result, 4 verification suite failure.
int cli_main(int argc, const char* const* argv);

}  // namespace ruelle

#endif
