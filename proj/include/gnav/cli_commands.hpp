#pragma once

namespace gnav {

/// Entry point of the `gnav` tool. Returns the process exit code:
/// 0 success, 1 invalid configuration or arguments, 2 I/O failure, 3 internal error.
int run_cli(int argc, char** argv);

}  // namespace gnav
