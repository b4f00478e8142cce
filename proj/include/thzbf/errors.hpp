#pragma once

#include <stdexcept>
#include <string>

namespace thzbf {

// Every library error names the operation that raised it so batch runs can
// report which computation rejected its input.
class Error : public std::runtime_error
{
public:
    Error(std::string operation, const std::string& message)
        : std::runtime_error(operation + ": " + message), operation_(std::move(operation))
    {
    }

    const std::string& operation() const noexcept { return operation_; }

private:
    std::string operation_;
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error
{
public:
    using Error::Error;
};

// Frequency outside the hull of an absorption table.
class RangeError : public Error
{
public:
    using Error::Error;
};

// No real steering angle exists: |(f/fc) sin psi| > 1.
class BeamSplitError : public DomainError
{
public:
    using DomainError::DomainError;
};

// A training protocol could not complete (e.g. no energy pulse detected).
class ProtocolError : public Error
{
public:
    using Error::Error;
};

// Malformed input file. `line` is 1-based; 0 when unknown.
class SchemaError : public Error
{
public:
    SchemaError(std::string source, int line, const std::string& message)
        : Error(std::move(source), (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + message),
          line_(line)
    {
    }

    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace thzbf
