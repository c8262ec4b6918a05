#ifndef MINDEX_CLI_HPP
#define MINDEX_CLI_HPP

namespace mindex {

// Exit codes: 0 success, 2 usage error, 3 numerical failure (a JSON error
// report is written for the latter).
int run_cli(int argc, const char* const* argv);

}  // namespace mindex

#endif
