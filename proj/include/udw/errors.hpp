#pragma once

#include <stdexcept>
#include <string>

namespace udw {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// result not representable even in scaled form
struct OverflowError : Error {
    using Error::Error;
};

// adaptive refinement ran out of evaluations before meeting tol
struct ConvergenceError : Error {
    using Error::Error;
};

// the quantity has no finite epsilon -> 0 limit
struct DivergenceError : Error {
    using Error::Error;
};

struct SingularKernelError : Error {
    using Error::Error;
};

struct DegenerateSeparationError : Error {
    using Error::Error;
};

struct MismatchError : Error {
    using Error::Error;
};

struct MissingElementError : Error {
    using Error::Error;
};

struct RegimeError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    ConfigError(const std::string& msg, int line = 0, std::string field = {})
        : Error(msg), line(line), field(std::move(field)) {}
    int line;
    std::string field;
};

}  // namespace udw
