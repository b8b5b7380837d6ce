#include "roco/oco.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "roco/norms.hpp"

namespace roco {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) {
        throw std::invalid_argument(msg);
    }
}

}  // namespace

FirGains::FirGains(Eigen::MatrixXd M_, int horizon_) : M(std::move(M_)), horizon(horizon_) {
    require(horizon > 0, "fir gains: horizon must be positive");
    require(M.cols() % horizon == 0, "fir gains: column count must be n_x * H");
}

FirGains FirGains::zero(Eigen::Index n_u, Eigen::Index n_x, int horizon) {
    return FirGains(Eigen::MatrixXd::Zero(n_u, n_x * horizon), horizon);
}

DisturbanceHistory::DisturbanceHistory(Eigen::Index dim, int capacity) : dim_(dim) {
    require(capacity > 0, "disturbance history: capacity must be positive");
    entries_.assign(static_cast<size_t>(capacity), Eigen::VectorXd::Zero(dim));
}

void DisturbanceHistory::push(const Eigen::VectorXd& w) {
    require(w.size() == dim_, "disturbance history: estimate dimension mismatch");
    for (size_t j = entries_.size() - 1; j > 0; --j) {
        entries_[j].swap(entries_[j - 1]);
    }
    entries_[0] = w;
}

const Eigen::VectorXd& DisturbanceHistory::at(int age) const {
    require(age >= 0 && age < capacity(), "disturbance history: age out of range");
    return entries_[static_cast<size_t>(age)];
}

Eigen::VectorXd DisturbanceHistory::stacked(int count) const {
    require(count > 0 && count <= capacity(), "disturbance history: stack count out of range");
    Eigen::VectorXd out(dim_ * count);
    for (int j = 0; j < count; ++j) {
        out.segment(dim_ * j, dim_) = entries_[static_cast<size_t>(j)];
    }
    return out;
}

EstimatorMemory EstimatorMemory::zero(Eigen::Index n_x, Eigen::Index n_u) {
    return EstimatorMemory{Eigen::VectorXd::Zero(n_x), Eigen::VectorXd::Zero(n_u)};
}

void EstimatorMemory::advance(const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    x_prev = x;
    u_prev = u;
}

CostWeights::CostWeights(Eigen::MatrixXd Q_, Eigen::MatrixXd R_)
    : Q(std::move(Q_)), R(std::move(R_)) {
    require(Q.rows() == Q.cols() && R.rows() == R.cols(), "cost weights: Q and R must be square");
    require((Q - Q.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
            "cost weights: Q must be symmetric");
    require((R - R.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
            "cost weights: R must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> q_eig(Q, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> r_eig(R, Eigen::EigenvaluesOnly);
    require(q_eig.eigenvalues().minCoeff() >= -1e-12,
            "cost weights: Q must be positive semidefinite");
    require(r_eig.eigenvalues().minCoeff() > 0.0, "cost weights: R must be positive definite");
}

Eigen::VectorXd estimate_disturbance(const EstimatorMemory& mem, const Eigen::VectorXd& x,
                                     const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    require(mem.x_prev.size() == A.rows() && x.size() == A.rows(),
            "estimate_disturbance: state dimension mismatch");
    require(mem.u_prev.size() == B.cols(), "estimate_disturbance: input dimension mismatch");
    return x - A * mem.x_prev - B * mem.u_prev;
}

Eigen::VectorXd fir_output(const FirGains& gains, const DisturbanceHistory& hist) {
    require(hist.dim() == gains.n_x(), "fir_output: history dimension mismatch");
    require(hist.capacity() >= gains.horizon, "fir_output: history shorter than horizon");
    return gains.M * hist.stacked(gains.horizon);
}

namespace {

// Shared rollout machinery.  History ages (newest first): the stack used
// at rollout time tau = t - H + s covers ages H - s .. 2H - s - 1.
struct RolloutInputs {
    int H;
    Eigen::Index n_x;
    Eigen::Index n_u;

    Eigen::VectorXd stack_at(const DisturbanceHistory& hist, int s) const {
        Eigen::VectorXd w(n_x * H);
        for (int i = 0; i < H; ++i) {
            w.segment(n_x * i, n_x) = hist.at(H - s + i);
        }
        return w;
    }
};

RolloutInputs check_rollout_args(const FirGains& gains, const DisturbanceHistory& hist,
                                 const Eigen::MatrixXd& K, const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& B) {
    const Eigen::Index n_x = gains.n_x();
    const Eigen::Index n_u = gains.n_u();
    require(hist.dim() == n_x, "ideal_cost: history dimension mismatch");
    require(hist.capacity() >= 2 * gains.horizon,
            "ideal_cost: history must supply the newest 2H estimates");
    require(A.rows() == n_x && A.cols() == n_x, "ideal_cost: A dimension mismatch");
    require(B.rows() == n_x && B.cols() == n_u, "ideal_cost: B dimension mismatch");
    require(K.rows() == n_u && K.cols() == n_x, "ideal_cost: K dimension mismatch");
    return RolloutInputs{gains.horizon, n_x, n_u};
}

}  // namespace

std::pair<double, IdealRollout> ideal_cost(const FirGains& gains, const DisturbanceHistory& hist,
                                           const Eigen::MatrixXd& K, const Eigen::MatrixXd& A,
                                           const Eigen::MatrixXd& B, const CostWeights& weights) {
    const RolloutInputs in = check_rollout_args(gains, hist, K, A, B);
    const int H = in.H;

    IdealRollout rollout;
    rollout.x_tilde.reserve(H + 1);
    rollout.u_tilde.reserve(H + 1);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(in.n_x);
    Eigen::VectorXd u = gains.M * in.stack_at(hist, 0);
    rollout.x_tilde.push_back(x);
    rollout.u_tilde.push_back(u);

    for (int s = 1; s <= H; ++s) {
        x = A * x + B * u + hist.at(H - s + 1);
        u = -K * x + gains.M * in.stack_at(hist, s);
        rollout.x_tilde.push_back(x);
        rollout.u_tilde.push_back(u);
    }

    const double g = x.dot(weights.Q * x) + u.dot(weights.R * u);
    return {g, std::move(rollout)};
}

Eigen::MatrixXd ideal_cost_gradient(const FirGains& gains, const DisturbanceHistory& hist,
                                    const Eigen::MatrixXd& K, const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& B, const CostWeights& weights) {
    const RolloutInputs in = check_rollout_args(gains, hist, K, A, B);
    const int H = in.H;

    // Nominal rollout, keeping the per-step stacked histories.
    std::vector<Eigen::VectorXd> stacks(H + 1);
    for (int s = 0; s <= H; ++s) {
        stacks[s] = in.stack_at(hist, s);
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(in.n_x);
    Eigen::VectorXd u = gains.M * stacks[0];
    for (int s = 1; s <= H; ++s) {
        x = A * x + B * u + hist.at(H - s + 1);
        u = -K * x + gains.M * stacks[s];
    }
    const Eigen::VectorXd qx = 2.0 * (weights.Q * x);
    const Eigen::VectorXd ru = 2.0 * (weights.R * u);

    // Sensitivities with respect to column b of M factor through the unit
    // row selector, so each one is an (n_x x n_u) / (n_u x n_u) pair.
    Eigen::MatrixXd grad(in.n_u, in.n_x * H);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(in.n_u, in.n_u);
    for (Eigen::Index b = 0; b < grad.cols(); ++b) {
        Eigen::MatrixXd xs = Eigen::MatrixXd::Zero(in.n_x, in.n_u);
        Eigen::MatrixXd us = stacks[0](b) * eye;
        for (int s = 1; s <= H; ++s) {
            xs = A * xs + B * us;
            us = -K * xs + stacks[s](b) * eye;
        }
        grad.col(b) = xs.transpose() * qx + us.transpose() * ru;
    }
    return grad;
}

FirGains opgd_update(const FirGains& gains, const Eigen::MatrixXd& grad, double eta,
                     std::optional<double> beta) {
    require(eta > 0.0, "opgd_update: learning rate must be positive");
    require(grad.rows() == gains.M.rows() && grad.cols() == gains.M.cols(),
            "opgd_update: gradient shape mismatch");
    if (beta) {
        require(*beta >= 0.0, "opgd_update: beta must be nonnegative");
    }
    Eigen::MatrixXd stepped = gains.M - eta * grad;
    if (beta) {
        const double norm = matrix_inf_norm(stepped);
        if (norm > *beta) {
            stepped *= *beta / norm;
        }
    }
    return FirGains(std::move(stepped), gains.horizon);
}

double mltv_norm(const std::vector<FirGains>& gain_trace) {
    require(!gain_trace.empty(), "mltv_norm: empty gain trace");
    double sup = 0.0;
    for (const FirGains& g : gain_trace) {
        sup = std::max(sup, matrix_inf_norm(g.M));
    }
    return sup;
}

std::vector<Eigen::VectorXd> fir_ltv_response(const std::vector<FirGains>& gain_trace,
                                              const std::vector<Eigen::VectorXd>& inputs) {
    require(!gain_trace.empty(), "fir_ltv_response: empty gain trace");
    const FirGains& first = gain_trace.front();
    DisturbanceHistory hist(first.n_x(), first.horizon);
    std::vector<Eigen::VectorXd> outputs;
    outputs.reserve(inputs.size());
    for (size_t t = 0; t < inputs.size(); ++t) {
        hist.push(inputs[t]);
        const FirGains& g = gain_trace[std::min(t, gain_trace.size() - 1)];
        outputs.push_back(fir_output(g, hist));
    }
    return outputs;
}

}  // namespace roco
