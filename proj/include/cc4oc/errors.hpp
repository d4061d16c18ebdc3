#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cc4oc {

/// Base for failures raised by the numerical kernels.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Zero or near-zero pivot in a direct solve.
class SingularMatrixError : public SolverError {
public:
    using SolverError::SolverError;
};

/// BiCGStab scalar (rho, omega or the alpha denominator) collapsed to zero.
class BreakdownError : public SolverError {
public:
    using SolverError::SolverError;
};

/// An iteration hit its cap. Carries the best iterate seen so callers can inspect it.
class NonConvergenceError : public SolverError {
public:
    NonConvergenceError(const std::string& what, std::vector<double> best, int iterations, double residual)
        : SolverError(what), best_iterate(std::move(best)), iterations(iterations), residual(residual) {}

    std::vector<double> best_iterate;
    int iterations;
    double residual;
};

/// A sampled function returned a non-finite value.
class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation outside the domain where a formula is defined.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Convergence-order estimation without a root.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cc4oc
