#pragma once

#include <stdexcept>
#include <string>

namespace adacnp {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape disagreement between operands (reports both shapes in the message).
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// A precondition of an operation was violated by the caller.
class ContractError : public Error {
public:
    explicit ContractError(const std::string& msg) : Error(msg) {}
};

// Numerical failure: non-finite values, non-positive-definite systems, divergence.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Malformed or inconsistent input data (files, rows, timestamps).
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

} // namespace adacnp
