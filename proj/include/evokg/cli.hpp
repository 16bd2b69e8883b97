#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "evokg/llmclient.hpp"

namespace evokg {

/// Exit codes of the command-line front-end.
enum ExitCode : int { kExitOk = 0, kExitData = 1, kExitUsage = 2 };

/// Runs `evokg <subcommand> ...`; `args` excludes the program name. Messages go
/// to `err`; `out` receives only help text. `transport` replaces the network
/// for `prompt --send` (tests pass a fake).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::shared_ptr<HttpTransport> transport = nullptr);

}  // namespace evokg
