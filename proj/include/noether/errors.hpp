#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noether {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed DSL text or definition file. `position` is a 0-based character
/// offset into the offending text; `line` is 1-based when known, else 0.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position, std::size_t line = 0)
        : Error(format(message, position, line)), message_(message), position_(position), line_(line) {}

    /// The message without the location suffix.
    const std::string& message() const { return message_; }
    std::size_t position() const { return position_; }
    std::size_t line() const { return line_; }

private:
    static std::string format(const std::string& message, std::size_t position, std::size_t line) {
        std::string s = message + " at position " + std::to_string(position);
        if (line != 0) s += " (line " + std::to_string(line) + ")";
        return s;
    }
    std::string message_;
    std::size_t position_;
    std::size_t line_;
};

class UndeclaredSymbolError : public ParseError {
public:
    UndeclaredSymbolError(const std::string& symbol, std::size_t position)
        : ParseError("undeclared symbol '" + symbol + "'", position), symbol_(symbol) {}

    const std::string& symbol() const { return symbol_; }

private:
    std::string symbol_;
};

/// Numeric evaluation left the domain of an operation (x/0, sqrt(-1), ...).
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::string subtree)
        : Error(what + " in " + subtree), subtree_(std::move(subtree)) {}

    const std::string& subtree() const { return subtree_; }

private:
    std::string subtree_;
};

/// No admissible sample point found within the draw budget.
class SamplingError : public Error {
public:
    using Error::Error;
};

/// det g vanished (or nearly) at a sampled point.
class RegularityError : public Error {
public:
    using Error::Error;
};

/// The Lagrangian (or L + c) vanished on the sampled domain of a solver that divides by it.
class LagrangianVanishesError : public Error {
public:
    using Error::Error;
};

/// Symbolic inversion of the Hessian failed.
class GInversionError : public Error {
public:
    using Error::Error;
};

}  // namespace noether
