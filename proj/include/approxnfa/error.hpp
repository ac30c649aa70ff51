#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace approxnfa {

/// Error categories. The numeric values double as CLI exit codes.
enum class ErrorKind {
    parameter = 2,    ///< invalid argument or violated precondition
    input = 3,        ///< malformed or missing input file
    unsupported = 3,  ///< regex construct outside the supported subset
    infeasible = 4,   ///< planner found no assignment within the bounds
    invariant = 5,    ///< detected invariant violation (e.g. under-approximation)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& code, const std::string& what)
        : std::runtime_error(what), kind_(kind), code_(code) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }
    /// Short machine-parseable token, e.g. "E_PARSE".
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what)
        : Error(ErrorKind::parameter, "E_PARAM", what) {}
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what)
        : Error(ErrorKind::input, "E_INPUT", what) {}
};

/// Parse failure in a line-oriented text format. line() is 1-based, 0 if unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorKind::input, "E_PARSE",
                line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnsupportedFeature : public Error {
public:
    UnsupportedFeature(const std::string& feature, const std::string& what)
        : Error(ErrorKind::unsupported, "E_UNSUPPORTED", "unsupported feature: " + feature + " (" + what + ")"),
          feature_(feature) {}

    const std::string& feature() const noexcept { return feature_; }

private:
    std::string feature_;
};

class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const std::string& what)
        : Error(ErrorKind::infeasible, "E_INFEASIBLE", what) {}
};

class InvariantViolation : public Error {
public:
    explicit InvariantViolation(const std::string& what)
        : Error(ErrorKind::invariant, "E_INVARIANT", what) {}
};

} // namespace approxnfa
