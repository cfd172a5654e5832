#pragma once

#include <string>
#include <vector>

namespace qagen::cli {

// Entry point behind main(); exposed so tests can drive the CLI in-process.
// Returns 0 on success, 1 on runtime failure, 2 on usage errors.
int cli_main(std::vector<std::string> args);

}  // namespace qagen::cli
