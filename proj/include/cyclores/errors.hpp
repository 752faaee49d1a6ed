#pragma once

#include <stdexcept>
#include <string>

namespace cyclores {

/// Argument outside the mathematical domain of a function (non-finite, negative order, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Level or eigenstate index outside the model's range.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A documented precondition of an operation does not hold for the given input.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Iterative method failed or a numerical consistency check fired.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid scenario configuration. `field()` names the offending key as `section.key`.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace cyclores
