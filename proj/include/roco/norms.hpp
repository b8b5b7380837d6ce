#pragma once

#include <Eigen/Dense>

#include "roco/state_space.hpp"

namespace roco {

/// Result of a norm computation.  For plain vector/matrix norms the
/// truncation fields are zero; for system norms `value` is the truncated
/// impulse-response sum, `truncation_horizon` the number of samples used
/// and `tail_bound` a certified bound on the discarded remainder, so the
/// exact norm lies in [value, value + tail_bound].
struct NormResult {
    double value = 0.0;
    long truncation_horizon = 0;
    double tail_bound = 0.0;
};

/// p-norm of a vector for p in {1, 2, inf}.
double vector_norm(const Eigen::VectorXd& v, double p);

/// Induced infinity-to-infinity norm of a matrix: max row absolute sum.
double matrix_inf_norm(const Eigen::MatrixXd& m);

/// l-infinity norm of a vector-valued signal: the peak over time of the
/// per-sample infinity norm.  Empty signals have norm zero.
double signal_linf_norm(const std::vector<Eigen::VectorXd>& signal);

/// Induced l-infinity norm of a stable discrete LTI system, i.e. the peak
/// row-wise l1 norm of its impulse response.  The impulse response is
/// summed adaptively until a geometric tail bound certifies the remainder
/// below tol/2.  Throws std::domain_error if the system is not Schur
/// stable (the norm is infinite).
NormResult induced_linf_norm(const StateSpace& sys, double tol = 1e-9);

}  // namespace roco
