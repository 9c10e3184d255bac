#pragma once

#include <stdexcept>
#include <string>

namespace plap {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate or inconsistent mesh input.
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a scalar kernel (e.g. negative modulus).
class DomainError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Linear solve that did not reach the requested residual.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double achieved_residual)
      : Error(what), residual_(achieved_residual) {}

  /// Relative residual ||Au - b|| / ||b|| of the best iterate.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Field transfer between meshes that are not parent and child.
class TransferError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration. Carries the 1-based line number, 0 if the
/// problem is not tied to a particular line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace plap
