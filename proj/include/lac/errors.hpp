#pragma once

#include <stdexcept>

namespace lac {

// Error categories map onto CLI exit codes: ValidationError/IoError -> 2,
// NumericalError -> 3 (see cli.cpp).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lac
