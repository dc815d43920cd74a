#pragma once

#include <stdexcept>
#include <string>

namespace mgp {

/// Base of every error raised by the library. `module()` names the stage
/// that failed so drivers can attribute the message.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Invalid configuration or violated call precondition.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input data that breaks a data-model invariant.
class DataError : public Error {
public:
    using Error::Error;
};

/// An iterative method failed to converge or produced non-finite values.
class NumericalError : public Error {
public:
    using Error::Error;
};

enum class LoadErrorKind {
    MissingFile,
    ParseError,
    NonSquare,
    SymmetryViolation,
    NegativeEntry,
    InconsistentNodeCount,
    InconsistentViewCount,
    TooFewViews,
};

const char* to_string(LoadErrorKind kind) noexcept;

/// Raised by population ingestion; `kind()` distinguishes the failure.
class LoadError : public DataError {
public:
    LoadError(LoadErrorKind kind, const std::string& what)
        : DataError("dataset", std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    LoadErrorKind kind() const noexcept { return kind_; }

private:
    LoadErrorKind kind_;
};

}  // namespace mgp
