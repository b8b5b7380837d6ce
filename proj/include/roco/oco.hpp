#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "roco/state_space.hpp"

namespace roco {

/// Stacked time-varying FIR coefficients [M^[0] ... M^[H-1]], one n_u x n_x
/// block per tap acting on the disturbance-estimate history.
struct FirGains {
    Eigen::MatrixXd M;  // n_u x (n_x * H)
    int horizon = 0;    // H

    FirGains() = default;
    FirGains(Eigen::MatrixXd M_, int horizon_);

    static FirGains zero(Eigen::Index n_u, Eigen::Index n_x, int horizon);

    Eigen::Index n_u() const { return M.rows(); }
    Eigen::Index n_x() const { return horizon > 0 ? M.cols() / horizon : 0; }

    /// Tap i, the block multiplying the estimate i steps in the past.
    Eigen::MatrixXd tap(int i) const {
        return M.middleCols(static_cast<Eigen::Index>(i) * n_x(), n_x());
    }
};

/// Fixed-length buffer of the most recent disturbance estimates, newest
/// first; pre-history entries are zero.
class DisturbanceHistory {
  public:
    DisturbanceHistory(Eigen::Index dim, int capacity);

    /// Inserts the newest estimate, dropping the oldest.
    void push(const Eigen::VectorXd& w);

    /// Estimate `age` steps in the past (0 = newest).
    const Eigen::VectorXd& at(int age) const;

    /// The newest `count` estimates stacked into one column.
    Eigen::VectorXd stacked(int count) const;

    Eigen::Index dim() const { return dim_; }
    int capacity() const { return static_cast<int>(entries_.size()); }

  private:
    Eigen::Index dim_;
    std::vector<Eigen::VectorXd> entries_;  // entries_[j] is the estimate j steps back
};

/// Previous plant state and applied input, as needed by the one-step
/// disturbance reconstructor; both start at zero.
struct EstimatorMemory {
    Eigen::VectorXd x_prev;
    Eigen::VectorXd u_prev;

    static EstimatorMemory zero(Eigen::Index n_x, Eigen::Index n_u);

    /// Records the state seen and input applied at the step just finished.
    void advance(const Eigen::VectorXd& x, const Eigen::VectorXd& u);
};

/// Quadratic per-step cost weights x'Qx + u'Ru; Q symmetric PSD, R
/// symmetric PD (validated on construction).
struct CostWeights {
    Eigen::MatrixXd Q;
    Eigen::MatrixXd R;

    CostWeights() = default;
    CostWeights(Eigen::MatrixXd Q_, Eigen::MatrixXd R_);
};

/// Hypothetical states and inputs of the fixed-gain rollout used by the
/// per-step learning cost, for tau = t-H .. t.
struct IdealRollout {
    std::vector<Eigen::VectorXd> x_tilde;
    std::vector<Eigen::VectorXd> u_tilde;
};

/// One-step disturbance reconstruction from the measured state:
///   w_hat_t = x_t - A x_prev - B u_prev.
/// The caller advances `mem` once the step's input is known.
Eigen::VectorXd estimate_disturbance(const EstimatorMemory& mem, const Eigen::VectorXd& x,
                                     const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// FIR filter output: the stacked gains applied to the newest H estimates.
Eigen::VectorXd fir_output(const FirGains& gains, const DisturbanceHistory& hist);

/// Cost of rolling the nominal plant out from zero state over the learning
/// horizon with static gains, driven by the recorded estimates.  Needs the
/// newest 2H estimates in `hist`.  Returns the terminal per-step cost and
/// the rollout itself.
std::pair<double, IdealRollout> ideal_cost(const FirGains& gains, const DisturbanceHistory& hist,
                                           const Eigen::MatrixXd& K, const Eigen::MatrixXd& A,
                                           const Eigen::MatrixXd& B, const CostWeights& weights);

/// Exact gradient of the rollout cost with respect to the stacked gains,
/// by forward sensitivity propagation (the rollout is affine in the gains).
Eigen::MatrixXd ideal_cost_gradient(const FirGains& gains, const DisturbanceHistory& hist,
                                    const Eigen::MatrixXd& K, const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& B, const CostWeights& weights);

/// Projected gradient step: M - eta * grad, radially rescaled onto the
/// induced-inf-norm ball of radius beta when the bound is given and the
/// step leaves it.
FirGains opgd_update(const FirGains& gains, const Eigen::MatrixXd& grad, double eta,
                     std::optional<double> beta);

/// Induced l-infinity norm of the time-varying FIR system: the supremum
/// over the trace of the per-step matrix induced inf-norms.
double mltv_norm(const std::vector<FirGains>& gain_trace);

/// Response of the time-varying FIR system to an input sequence, zero
/// pre-history.  Steps past the end of the trace reuse its last entry.
std::vector<Eigen::VectorXd> fir_ltv_response(const std::vector<FirGains>& gain_trace,
                                              const std::vector<Eigen::VectorXd>& inputs);

}  // namespace roco
