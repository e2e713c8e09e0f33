#pragma once

#include <stdexcept>
#include <string>

namespace httool {

/// Base class for all httool errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A parameter or argument is outside its mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An input file is missing, unreadable or malformed.
class InputError : public Error {
public:
    using Error::Error;
};

/// The model lacks a capability the operation needs (density, sampler, ...).
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// A semi-infinite integral failed the Cauchy test: the quantity diverges.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// An evaluation produced NaN or violated a runtime consistency contract.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// An operation precondition does not hold for the given inputs.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A ratio denominator fell below the representable floor (1e-300).
class UnderflowError : public Error {
public:
    using Error::Error;
};

/// Scenario configuration is invalid (CLI exit code 2).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Output files or directories could not be written (CLI exit code 3).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace httool
