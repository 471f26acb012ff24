#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace heatshift {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input or parameter outside its documented domain. Carries every violation
/// found, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::string message);
    explicit ValidationError(std::vector<std::string> violations);

    const std::vector<std::string> &violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Lookup of a year that is not on a series' grid.
class GridError : public Error {
public:
    using Error::Error;
};

/// Operation on a closed, expired or unknown session.
class SessionError : public Error {
public:
    using Error::Error;
};

/// Request that clashes with work already in progress.
class ConflictError : public Error {
public:
    using Error::Error;
};

/// Not-found condition for service lookups (datasets, runs).
class NotFoundError : public Error {
public:
    using Error::Error;
};

} // namespace heatshift
