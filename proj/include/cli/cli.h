#pragma once

namespace cli {

// full command-line front end; returns the process exit code
// 0 success, 1 user error, 2 internal failure
int cli_main(int argc, const char* const* argv);

}  // namespace cli
