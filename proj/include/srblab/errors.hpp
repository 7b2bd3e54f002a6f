#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srb {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a map (e.g. evaluation on the discontinuity).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameter set violating a structural invariant.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its cap before reaching the requested tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Integrator produced a non-finite state or left the trapping ball.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A forward orbit landed exactly on the discontinuity at iterate `iterate()`.
class DiscontinuityHit : public DomainError {
 public:
  DiscontinuityHit(const std::string& what, std::size_t iterate)
      : DomainError(what), iterate_(iterate) {}
  std::size_t iterate() const noexcept { return iterate_; }

 private:
  std::size_t iterate_;
};

/// Malformed or inadmissible experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace srb
