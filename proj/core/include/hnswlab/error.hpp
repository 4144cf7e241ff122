#pragma once

#include <stdexcept>
#include <string>

namespace hnswlab {

/// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind {
    Usage,      // invalid parameters or configuration
    Data,       // malformed or inconsistent input data / files
    Invariant,  // internal consistency check failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& message) : Error(ErrorKind::Usage, message) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error(ErrorKind::Data, message) {}
};

class InvariantError : public Error {
public:
    explicit InvariantError(const std::string& message) : Error(ErrorKind::Invariant, message) {}
};

}  // namespace hnswlab
