#pragma once

#include <stdexcept>
#include <string>

namespace varmp {

/// Bad model declaration, missing sampling box, unreadable input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An exponent window required by the growth hypotheses is empty.
class WindowEmptyError : public std::invalid_argument {
public:
    WindowEmptyError(std::string condition, const std::string& what)
        : std::invalid_argument(what), condition_(std::move(condition)) {}
    const std::string& condition() const noexcept { return condition_; }

private:
    std::string condition_;
};

/// Iterative method hit its cap; carries the last objective value.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_value)
        : std::runtime_error(what), last_value_(last_value) {}
    double last_value() const noexcept { return last_value_; }

private:
    double last_value_;
};

/// Non-finite integrand; `element` is the offending element index.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, std::size_t element)
        : std::runtime_error(what), element_(element) {}
    std::size_t element() const noexcept { return element_; }

private:
    std::size_t element_;
};

/// Mountain-pass geometry could not be certified.
class GeometryError : public std::runtime_error {
public:
    enum class Kind { unavailable, superlinearity_not_detected };
    GeometryError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

} // namespace varmp
