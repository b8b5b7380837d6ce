#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace roco {

/// Discrete-time LTI system in state-space form:
///   x_{t+1} = A x_t + B u_t
///   y_t     = C x_t + D u_t
///
/// A static (memoryless) gain is represented with an empty A (0x0) and
/// empty B/C of conforming shape; D then carries the whole map.
/// Instances are immutable after construction and safe to share between
/// threads.
struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;

    StateSpace() = default;
    StateSpace(Eigen::MatrixXd A_, Eigen::MatrixXd B_, Eigen::MatrixXd C_, Eigen::MatrixXd D_);

    Eigen::Index n_state() const { return A.rows(); }
    Eigen::Index n_in() const { return D.cols(); }
    Eigen::Index n_out() const { return D.rows(); }
};

/// SISO rational transfer function in the forward shift operator z,
/// coefficients in descending powers of z.  G(z) = num(z)/den(z).
struct TransferFunctionSiso {
    std::vector<double> num;
    std::vector<double> den;
};

/// State vector owned by one simulation of a StateSpace system.
struct SystemState {
    Eigen::VectorXd x;
};

/// Zero state of conforming dimension for `sys`.
SystemState initial_state(const StateSpace& sys);

/// Minimal canonical (controller-form) realization of a proper SISO
/// transfer function.  Strictly proper inputs yield D = 0.
/// Throws std::invalid_argument for non-proper or degenerate inputs.
StateSpace tf_to_ss(const TransferFunctionSiso& tf);

/// One simulation step: returns the successor state and the output at the
/// current step.  Throws std::invalid_argument on dimension mismatch.
std::pair<SystemState, Eigen::VectorXd> step(const StateSpace& sys, const SystemState& state,
                                             const Eigen::VectorXd& input);

/// System whose transfer function is sys - gain * I.  Requires a square
/// input/output map (n_in == n_out); only D changes.
StateSpace subtract_gain(const StateSpace& sys, double gain);

/// Largest eigenvalue magnitude of the A matrix; 0 for static systems.
double spectral_radius(const StateSpace& sys);

/// First `count` impulse-response samples h_0 = D, h_t = C A^{t-1} B.
std::vector<Eigen::MatrixXd> impulse_response(const StateSpace& sys, int count);

/// Owns the evolving state of one system instance; convenience wrapper for
/// per-sample loops.
class SystemSimulator {
  public:
    explicit SystemSimulator(const StateSpace& sys)
        : sys_(&sys), x_(Eigen::VectorXd::Zero(sys.n_state())) {}

    /// Emits y_t and advances the state.
    Eigen::VectorXd step(const Eigen::VectorXd& input);

    const Eigen::VectorXd& state() const { return x_; }

  private:
    const StateSpace* sys_;
    Eigen::VectorXd x_;
};

}  // namespace roco
