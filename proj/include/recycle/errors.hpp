#pragma once

#include <stdexcept>
#include <string>

namespace recycle {

/// Malformed or unreadable configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter set violating a model or configuration invariant (exit code 3).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A primitive function evaluated outside its domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Shooting or bracketing failure (exit code 4).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output could not be written (exit code 5).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace recycle
