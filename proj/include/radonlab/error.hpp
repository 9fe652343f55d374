#pragma once

#include <stdexcept>
#include <string>

namespace radonlab {

/// Failure categories. The numeric values double as C API status codes and
/// CLI exit codes.
enum class ErrorKind : int {
  argument = 2,
  io = 3,
  numerical = 4,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& what) : Error(ErrorKind::argument, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond)
    throw ArgumentError(what);
}

} // namespace radonlab
