#include "roco/state_space.hpp"

#include <cmath>
#include <stdexcept>

namespace roco {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) {
        throw std::invalid_argument(msg);
    }
}

}  // namespace

StateSpace::StateSpace(Eigen::MatrixXd A_, Eigen::MatrixXd B_, Eigen::MatrixXd C_,
                       Eigen::MatrixXd D_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), D(std::move(D_)) {
    require(A.rows() == A.cols(), "state space: A must be square");
    require(B.rows() == A.rows(), "state space: B row count must match state dimension");
    require(C.cols() == A.rows(), "state space: C column count must match state dimension");
    require(D.rows() == C.rows(), "state space: D row count must match output dimension");
    require(D.cols() == B.cols(), "state space: D column count must match input dimension");
    require(A.allFinite() && B.allFinite() && C.allFinite() && D.allFinite(),
            "state space: matrices must be finite");
}

SystemState initial_state(const StateSpace& sys) {
    return SystemState{Eigen::VectorXd::Zero(sys.n_state())};
}

StateSpace tf_to_ss(const TransferFunctionSiso& tf) {
    require(!tf.den.empty(), "transfer function: denominator is empty");
    require(tf.den.front() != 0.0, "transfer function: leading denominator coefficient is zero");

    // Drop leading numerator zeros so properness is judged on the true degree.
    std::vector<double> num = tf.num;
    while (num.size() > 1 && num.front() == 0.0) {
        num.erase(num.begin());
    }
    if (num.empty()) {
        num.push_back(0.0);
    }
    require(num.size() <= tf.den.size(),
            "transfer function: numerator degree exceeds denominator degree (not proper)");

    const int n = static_cast<int>(tf.den.size()) - 1;

    // Monic denominator z^n + a_1 z^{n-1} + ... + a_n.
    std::vector<double> a(n + 1);
    for (int i = 0; i <= n; ++i) {
        a[i] = tf.den[i] / tf.den[0];
    }
    // Numerator padded to b_0 z^n + ... + b_n.
    std::vector<double> b(n + 1, 0.0);
    const int pad = n + 1 - static_cast<int>(num.size());
    for (size_t i = 0; i < num.size(); ++i) {
        b[pad + i] = num[i] / tf.den[0];
    }

    const double d = b[0];
    if (n == 0) {
        return StateSpace(Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 1), Eigen::MatrixXd(1, 0),
                          Eigen::MatrixXd::Constant(1, 1, d));
    }

    // Controller canonical form: first companion row carries -a_i, input
    // enters the first state, C holds the strictly proper remainder.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        A(0, j) = -a[j + 1];
    }
    for (int i = 1; i < n; ++i) {
        A(i, i - 1) = 1.0;
    }
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, 1);
    B(0, 0) = 1.0;
    Eigen::MatrixXd C(1, n);
    for (int j = 0; j < n; ++j) {
        C(0, j) = b[j + 1] - d * a[j + 1];
    }
    return StateSpace(A, B, C, Eigen::MatrixXd::Constant(1, 1, d));
}

std::pair<SystemState, Eigen::VectorXd> step(const StateSpace& sys, const SystemState& state,
                                             const Eigen::VectorXd& input) {
    require(state.x.size() == sys.n_state(), "step: state dimension mismatch");
    require(input.size() == sys.n_in(), "step: input dimension mismatch");
    SystemState next{sys.A * state.x + sys.B * input};
    Eigen::VectorXd output = sys.C * state.x + sys.D * input;
    return {std::move(next), std::move(output)};
}

StateSpace subtract_gain(const StateSpace& sys, double gain) {
    require(sys.n_in() == sys.n_out(), "subtract_gain: system must have square input/output map");
    Eigen::MatrixXd D = sys.D;
    D.diagonal().array() -= gain;
    return StateSpace(sys.A, sys.B, sys.C, std::move(D));
}

double spectral_radius(const StateSpace& sys) {
    if (sys.n_state() == 0) {
        return 0.0;
    }
    return sys.A.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<Eigen::MatrixXd> impulse_response(const StateSpace& sys, int count) {
    std::vector<Eigen::MatrixXd> h;
    h.reserve(static_cast<size_t>(std::max(count, 0)));
    if (count <= 0) {
        return h;
    }
    h.push_back(sys.D);
    Eigen::MatrixXd w = sys.B;
    for (int t = 1; t < count; ++t) {
        h.push_back(sys.C * w);
        w = sys.A * w;
    }
    return h;
}

Eigen::VectorXd SystemSimulator::step(const Eigen::VectorXd& input) {
    require(input.size() == sys_->n_in(), "step: input dimension mismatch");
    Eigen::VectorXd y = sys_->C * x_ + sys_->D * input;
    x_ = sys_->A * x_ + sys_->B * input;
    return y;
}

}  // namespace roco
