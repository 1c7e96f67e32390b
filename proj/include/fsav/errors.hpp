#pragma once

#include <stdexcept>
#include <string>

namespace fsav {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Field/grid/symbol sizes disagree.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

/// A construction argument violates a precondition (bad N, bad domain, bad alpha).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// E(P,Q) + C0 fell below the positivity floor; the SAV square root is undefined.
/// Raising C0 in the model parameters is the intended fix.
class NonpositiveSavEnergy : public Error {
public:
    NonpositiveSavEnergy(std::string msg, double energy)
        : Error(std::move(msg)), energy_(energy) {}
    double energy() const { return energy_; }

private:
    double energy_;
};

/// |1 + (tau/4)*chi| dropped below the guard; the step size is too large
/// relative to the nonlinear term.
class SingularDenominator : public Error {
public:
    SingularDenominator(std::string msg, double denominator)
        : Error(std::move(msg)), denominator_(denominator) {}
    double denominator() const { return denominator_; }

private:
    double denominator_;
};

/// Fixed-point iteration exhausted its iteration budget.
class NoConvergence : public Error {
public:
    NoConvergence(std::string msg, double last_residual, int iterations)
        : Error(std::move(msg)), last_residual_(last_residual), iterations_(iterations) {}
    double last_residual() const { return last_residual_; }
    int iterations() const { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

/// T/tau is not an integer within tolerance.
class NonIntegerStepCount : public Error {
public:
    using Error::Error;
};

/// Relative drift requested against a reference value too close to zero.
class DegenerateReference : public Error {
public:
    using Error::Error;
};

/// Two runs cannot be compared: grids are neither equal nor a coarse-in-fine pair.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// Configuration file problem; kind() distinguishes the failure class and the
/// message names the offending key/line.
class ConfigError : public Error {
public:
    enum class Kind { UnknownKey, TypeError, ConstraintViolation };

    ConfigError(Kind kind, std::string msg) : Error(std::move(msg)), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// A --check threshold was violated (maps to exit code 4 in the CLI).
class CheckFailed : public Error {
public:
    using Error::Error;
};

} // namespace fsav
