#pragma once

namespace plebo::cli {

// Entry point for the `plebo` tool. Exit codes: 0 success, 1 runtime
// failure, 2 usage/parse errors.
int run(int argc, char** argv);

}  // namespace plebo::cli
