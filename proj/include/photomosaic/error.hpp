#pragma once

#include <stdexcept>
#include <string>

namespace photomosaic {

// Domain failure: bad input, corrupt cache, infeasible problem. The CLI maps
// these to exit code 1.
class MosaicError : public std::runtime_error {
public:
    explicit MosaicError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace photomosaic
