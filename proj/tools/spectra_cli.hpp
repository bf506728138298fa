#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kfspectra::cli {

/// Runs the `spectra` command line. Data goes to `out`, diagnostics to `err`.
/// Returns the process exit code: 0 when every requested check passed, 1 when
/// a check failed, 2 on usage or validation errors.
int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err);

} // namespace kfspectra::cli
