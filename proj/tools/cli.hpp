#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace photomosaic::cli {

/// Entry point behind the `photomosaic` binary. Returns 0 on success, 1 on a
/// domain error (bad input, infeasible problem, corrupt cache) and 2 on a
/// command-line usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace photomosaic::cli
