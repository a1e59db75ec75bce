#ifndef MIRS_CLI_HPP
#define MIRS_CLI_HPP

namespace mirs {

// Entry point for the mirs command-line tool (simulate / estimate /
// generate).  Returns the process exit code: 0 success, 1 runtime failure,
// 2 usage or input validation error.
int run_cli(int argc, const char* const* argv);

}  // namespace mirs

#endif  // MIRS_CLI_HPP
