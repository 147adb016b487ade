#pragma once

#include <stdexcept>
#include <string>

namespace eitmem {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input: out-of-range parameters, malformed configs, unsatisfiable grids.
// Maps to CLI exit code 2.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Runtime numerical failure: poles, non-convergence, resolution violations.
// Maps to CLI exit code 3.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

}  // namespace eitmem
