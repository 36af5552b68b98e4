#pragma once

#include <stdexcept>
#include <string>

namespace mfl {

/// Exit codes used by the command-line tool. Library code throws the typed
/// exceptions below; the CLI maps them onto these codes.
enum class ExitCode : int {
    ok = 0,
    config_error = 2,
    numerical_failure = 3,
    budget_refused = 4,
};

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual ExitCode exit_code() const { return ExitCode::numerical_failure; }
};

/// Invalid configuration or argument values (bad kernel parameters, dt <= 0,
/// unknown config keys, precondition violations).
class ConfigError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::config_error; }
};

/// Runtime numerical failures (blow-up, positivity loss, undersampled bins).
class NumericalError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::numerical_failure; }
};

/// Work refused because it exceeds the documented desk-scale budget.
class BudgetError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::budget_refused; }
};

} // namespace mfl
