#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace tdroute {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Slopes closer than this are treated as equal when removing breakpoints.
inline constexpr double EPS_SLOPE = 1e-9;
// Abscissae closer than this are treated as coincident.
inline constexpr double EPS_T = 1e-9;
// Stand-in for -infinity on the left of identity functions.
inline constexpr double kTimeBound = 1e9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfDomain : public Error {
 public:
  explicit OutOfDomain(const std::string& what) : Error(what) {}
};

class EmptyDomain : public Error {
 public:
  explicit EmptyDomain(const std::string& what) : Error(what) {}
};

class MismatchedDomain : public Error {
 public:
  explicit MismatchedDomain(const std::string& what) : Error(what) {}
};

class InvalidEpsilon : public Error {
 public:
  explicit InvalidEpsilon(const std::string& what) : Error(what) {}
};

class IndexOutOfRange : public Error {
 public:
  explicit IndexOutOfRange(const std::string& what) : Error(what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column = 0)
      : Error(format(msg, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& msg, std::size_t line,
                            std::size_t column) {
    std::string s = "line " + std::to_string(line);
    if (column > 0) s += ", column " + std::to_string(column);
    return s + ": " + msg;
  }

  std::size_t line_;
  std::size_t column_;
};

}  // namespace tdroute
