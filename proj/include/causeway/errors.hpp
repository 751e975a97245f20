#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace causeway {

// Base for every error the engine raises on bad input or undefined quantities.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Text input that does not conform to one of the file or query grammars.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Structurally invalid model: cycles, undeclared endpoints, bad tables.
class ModelError : public Error {
public:
    using Error::Error;
};

class UnknownVariable : public Error {
public:
    explicit UnknownVariable(const std::string& name) : Error("unknown variable '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// A conditional probability term whose conditioning event has zero mass.
class ConditioningOnZero : public Error {
public:
    explicit ConditioningOnZero(const std::string& event)
        : Error("conditioning event has probability zero: " + event), event_(event) {}
    const std::string& event() const noexcept { return event_; }

private:
    std::string event_;
};

class MissingDataPresent : public Error {
public:
    explicit MissingDataPresent(const std::string& column)
        : Error("column '" + column + "' has missing cells; use recoverability analysis") {}
};

class ZeroEvidence : public Error {
public:
    explicit ZeroEvidence(const std::string& evidence)
        : Error("evidence has probability zero: " + evidence) {}
};

class StateSpaceOverflow : public Error {
public:
    using Error::Error;
};

class TooManyDegenerateResamples : public Error {
public:
    using Error::Error;
};

class ConfoundedMediator : public Error {
public:
    using Error::Error;
};

class NotRecoverable : public Error {
public:
    using Error::Error;
};

}  // namespace causeway
