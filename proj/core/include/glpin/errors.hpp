#pragma once

#include <stdexcept>
#include <string>

namespace glpin {

/// Invalid geometry / parameters / config documents.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solver failed to converge or diverged.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A stated invariant of the data was violated (e.g. weight out of bounds).
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace glpin
