#pragma once

#include <stdexcept>
#include <string>

namespace simenh {

// Failure categories, mapped 1:1 onto CLI exit codes (see tools/simenh.cpp).
enum class ErrorKind {
    validation,  // bad arguments, malformed config, contract violations -> exit 1
    numeric,     // non-finite values escaping a computation             -> exit 2
    io,          // filesystem trouble, unparsable input files           -> exit 3
    network,     // push sink unreachable / exhausted retries            -> exit 4
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

// Malformed content in an otherwise readable file. Carries the offending
// line (1-based); column is optional (0 = unknown).
class ParseError : public IoError {
public:
    ParseError(const std::string& what, long line, long column = 0)
        : IoError(what + " (line " + std::to_string(line) +
                  (column > 0 ? ", column " + std::to_string(column) : "") + ")"),
          line_(line),
          column_(column) {}
    long line() const { return line_; }
    long column() const { return column_; }

private:
    long line_;
    long column_;
};

class NetworkError : public Error {
public:
    explicit NetworkError(const std::string& what) : Error(ErrorKind::network, what) {}
};

}  // namespace simenh
