#pragma once

#include <stdexcept>
#include <string>

namespace sae {

/// Base class for every error the toolkit throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (e.g. Gamma at x <= 0, turning point above the barrier top).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Quadrature failed to reach the requested tolerance. Carries the best
/// estimate obtained so far together with its error bound.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double best, double err)
        : Error(msg), best_estimate(best), error_estimate(err) {}
    double best_estimate;
    double error_estimate;
};

/// Root finder was handed an interval without a sign change.
class BracketError : public Error {
public:
    using Error::Error;
};

/// ODE step size underflowed before reaching the target point.
class StiffnessError : public Error {
public:
    StiffnessError(const std::string& msg, double x)
        : Error(msg), reached_x(x) {}
    double reached_x;
};

/// Scattering projection onto the asymptotic basis was ill-conditioned.
class ProjectionError : public Error {
public:
    using Error::Error;
};

/// Input data violates the invariants required by an extraction step.
class DataQualityError : public Error {
public:
    using Error::Error;
};

/// Asymptotic regime not reached at the truncation radius; the caller
/// should retry with a larger one.
class AsymptoticsError : public Error {
public:
    using Error::Error;
};

/// Complex-turning-point search failed; the caller should fall back to
/// numeric scattering.
class EstimationError : public Error {
public:
    using Error::Error;
};

/// A sampled limit did not settle within tolerance.
class LimitError : public Error {
public:
    LimitError(const std::string& msg, std::string trace_)
        : Error(msg), trace(std::move(trace_)) {}
    std::string trace;
};

/// Invalid command-line or file configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace sae
