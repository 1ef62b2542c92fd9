// errors.hpp — exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace qbcast {

// Matrix/operator dimensions do not fit the operation.
struct ShapeError : std::invalid_argument {
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Input value outside the mathematically admissible range.
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative numerical routine failed to reach its target accuracy.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A limit process exhausted its iteration budget.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A documented precondition of an operation does not hold for the inputs.
struct PreconditionError : std::invalid_argument {
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace qbcast
