#pragma once

#include <stdexcept>
#include <string>

namespace rfsi {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a documented invariant (surfaces, materials, sources).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Mesh map is not invertible somewhere.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Laplace parameter outside the half-plane Re s > 0.
class DomainError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Krylov iteration did not reach the requested tolerance.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace rfsi
