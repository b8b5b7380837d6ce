#pragma once

#include <Eigen/Dense>
#include <vector>

#include "roco/norms.hpp"
#include "roco/state_space.hpp"

namespace roco {

/// The known LTI part P of the feedback interconnection, with the plant,
/// baseline gain and estimator absorbed.  State is [plant state; estimator
/// state].  Inputs are [q; u_oco; d] and outputs [p; w_hat; x]:
///   q     (n_u)  output of the uncertainty block, fed back into the loop
///   u_oco (n_u)  output of the time-varying FIR block
///   d     (n_u)  exogenous disturbance
///   p     (n_u)  perturbed plant input, input to the uncertainty block
///   w_hat (n_x)  disturbance estimate, input to the FIR block
///   x     (n_x)  plant state, the regulated output
struct InterconnectionP {
    StateSpace sys;
    Eigen::Index n_u = 0;
    Eigen::Index n_x = 0;
    Eigen::Index n_e = 0;

    InterconnectionP() = default;
    InterconnectionP(StateSpace sys_, Eigen::Index n_u_, Eigen::Index n_x_, Eigen::Index n_e_);

    /// (q, u_oco) -> (p, w_hat)
    StateSpace p11() const;
    /// d -> (p, w_hat)
    StateSpace p12() const;
    /// (q, u_oco) -> x
    StateSpace p21() const;
    /// d -> x
    StateSpace p22() const;
};

/// Positive scalings minimizing the scaled norm, with d1 fixed to 1 (only
/// the ratio d2/d1 affects the recombined loop gain).
struct ScaleSearchResult {
    double d1 = 1.0;
    double d2 = 1.0;
    double scaled_norm = 0.0;
};

/// One feasibility probe of the bound search.
struct BetaProbe {
    double beta = 0.0;
    double d2 = 1.0;
    double scaled_norm = 0.0;
    bool feasible = false;
};

/// Outcome of the maximal-FIR-bound search.
struct StabilityReport {
    double delta_bound = 0.0;
    double beta_star = 0.0;
    bool unbounded = false;
    ScaleSearchResult scales;
    bool certified = false;
    std::vector<BetaProbe> trace;
};

/// Estimator state-space form for the one-step disturbance reconstructor:
/// it stores -A x_t - B u_t and adds the current state, so the output is
/// x_t - A x_{t-1} - B u_{t-1}.  Input layout [x; u], output w_hat.
StateSpace reconstructor_estimator(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Assembles P from the plant (A, B of x_{t+1} = A x + B v), the baseline
/// state-feedback gain K and an estimator with input layout [x; u] and
/// output w_hat.  Throws std::invalid_argument on dimension mismatch and
/// std::domain_error("baseline not stabilizing") if the closed-loop A
/// matrix is not Schur stable.
InterconnectionP build_interconnection(const StateSpace& plant, const Eigen::MatrixXd& K,
                                       const StateSpace& estimator);

/// P11 with its uncertainty/FIR channels scaled:
///   diag(1/d1 I, 1/d2 I) * P11 * diag(d1*delta I, d2*beta I).
StateSpace scaled_p11(const InterconnectionP& P, double delta, double beta, double d1, double d2);

/// Induced l-infinity norm of the scaled P11.
double scaled_norm(const InterconnectionP& P, double delta, double beta, double d1, double d2,
                   double tol = 1e-9);

/// Minimizes scaled_norm over the scale ratio: coarse grid over
/// log10(d2) in [-6, 6] followed by golden-section refinement, d1 = 1.
/// The result is never worse than the unscaled value at d1 = d2 = 1.
ScaleSearchResult optimize_scales(const InterconnectionP& P, double delta, double beta,
                                  double norm_tol = 1e-9);

/// Largest beta <= beta_cap (within relative tolerance tol) whose optimal
/// scaled norm certifies the loop, found by bracketing and bisection.
/// Reports unbounded when even beta_cap is certified, and an uncertified
/// zero bound when no beta is.
StabilityReport max_beta(const InterconnectionP& P, double delta, double tol = 1e-3,
                         double beta_cap = 1e4);

/// Closed-form disturbance-to-state gain bound for a certified loop, using
/// the scaled blocks at the given scales:
///   ||P22|| + ||P21~|| ||P12~|| / (1 - ||P11~||)
/// with the normalized uncertainty/FIR blocks having gain at most one.
/// Throws std::domain_error if the scaled norm is not < 1.
double closed_loop_gain_bound(const InterconnectionP& P, double delta, double beta, double d1,
                              double d2, double tol = 1e-9);

}  // namespace roco
