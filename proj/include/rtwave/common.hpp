#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace rtwave {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a pressure law or enthalpy.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A tabulated law cannot evaluate an integral required by the caller.
class DomainCoverageError : public Error {
 public:
  using Error::Error;
};

class AdmissibilityError : public Error {
 public:
  AdmissibilityError(int condition, const std::string& what)
      : Error(what), condition_(condition) {}
  int condition() const { return condition_; }

 private:
  int condition_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

/// Total density became nonpositive somewhere.
class StateValidityError : public Error {
 public:
  using Error::Error;
};

/// The flattening map left the small-perturbation regime.
class GeometryBreakdownError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

/// Upper fluid occupies [0, ell], lower fluid [-b, 0].
enum class Layer { plus = 0, minus = 1 };

inline int layer_index(Layer l) { return static_cast<int>(l); }

}  // namespace rtwave
