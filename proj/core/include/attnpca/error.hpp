#pragma once

#include <stdexcept>
#include <string>

namespace attnpca {

/// Caller broke a documented precondition (bad argument combination, bad count).
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input data is missing, malformed, or inconsistent.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine could not produce a valid result (rank deficiency, non-PD matrix).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace attnpca
