#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace roadmodal {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DecompositionError : public Error {
public:
    using Error::Error;
};

/// Eigenvalue cluster that could not be paired or orthogonalised.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Raised when a pole cannot be expressed as (frequency, damping ratio).
class ClassificationError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

/// Lag or frequency grid too coarse for the requested quantity.
class ResolutionError : public Error {
public:
    using Error::Error;
};

class AliasingError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

/// Carries every violation found, not only the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v)
    {
        std::string msg = "invalid scenario:";
        for (const auto& s : v) {
            msg += "\n  - ";
            msg += s;
        }
        return msg;
    }

    std::vector<std::string> violations_;
};

} // namespace roadmodal
