#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qlap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the documented domain (q not in (0,1), k > n, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation hit (or came within machine precision of) a pole.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, double where)
      : Error(what), where_(where) {}
  double where() const noexcept { return where_; }

 private:
  double where_;
};

/// A series, product or lattice sum failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A time-domain atom has no rule in the transform table.
class UnsupportedAtom : public Error {
 public:
  using Error::Error;
};

/// A parsed product cannot be normalized into coefficient * t^n * atom.
class UnsupportedShape : public Error {
 public:
  using Error::Error;
};

/// An s-domain expression matches no entry of the inversion table.
class NoInversionPattern : public Error {
 public:
  using Error::Error;
};

/// Attempt to sum a formal (divergent) series numerically.
class AsymptoticSeriesError : public Error {
 public:
  using Error::Error;
};

/// Wrong number of initial values / coefficients.
class ArityError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column,
             std::vector<std::string> expected)
      : Error(format(message, line, column, expected)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string format(const std::string& message, int line, int column,
                            const std::vector<std::string>& expected) {
    std::string out = "syntax error at " + std::to_string(line) + ":" +
                      std::to_string(column) + ": " + message;
    if (!expected.empty()) {
      out += " (expected one of:";
      for (const auto& e : expected) out += " " + e;
      out += ")";
    }
    return out;
  }

  int line_;
  int column_;
  std::vector<std::string> expected_;
};

}  // namespace qlap
