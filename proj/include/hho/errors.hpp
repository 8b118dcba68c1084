#pragma once

#include <stdexcept>
#include <string>

namespace hho {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-conforming or inconsistent connectivity.
class StructuralError : public Error {
public:
  using Error::Error;
};

/// A triangle given with non-positive signed area.
class OrientationError : public Error {
public:
  using Error::Error;
};

/// A boundary edge without a Dirichlet/Neumann label.
class LabelingError : public Error {
public:
  using Error::Error;
};

class ParameterError : public Error {
public:
  using Error::Error;
};

class GeometryError : public Error {
public:
  using Error::Error;
};

/// Ill-posed or incomplete problem data (missing diffusion region, no Dirichlet face, ...).
class SpecError : public Error {
public:
  using Error::Error;
};

/// Linear solver failure. Carries the relative residual that was reached.
class SolverError : public Error {
public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

class MarkingError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Size cap of a dense verification path exceeded.
class OracleError : public Error {
public:
  using Error::Error;
};

} // namespace hho
