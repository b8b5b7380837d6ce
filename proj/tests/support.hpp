#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "roco/oco.hpp"
#include "roco/state_space.hpp"

namespace roco::testing {

inline Eigen::MatrixXd random_matrix(std::mt19937& rng, Eigen::Index rows, Eigen::Index cols,
                                     double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = dist(rng);
        }
    }
    return m;
}

// Random system with spectral radius at most max_radius.
inline StateSpace random_stable_system(std::mt19937& rng, int max_order, double max_radius,
                                       Eigen::Index n_in, Eigen::Index n_out,
                                       bool with_feedthrough = true) {
    std::uniform_int_distribution<int> order_dist(1, max_order);
    std::uniform_real_distribution<double> radius_dist(0.2, max_radius);
    const int n = order_dist(rng);
    Eigen::MatrixXd A = random_matrix(rng, n, n);
    const double rho = A.eigenvalues().cwiseAbs().maxCoeff();
    if (rho > 0.0) {
        A *= radius_dist(rng) / rho;
    }
    Eigen::MatrixXd D = with_feedthrough ? random_matrix(rng, n_out, n_in)
                                         : Eigen::MatrixXd::Zero(n_out, n_in);
    return StateSpace(A, random_matrix(rng, n, n_in), random_matrix(rng, n_out, n), D);
}

// Brute-force induced l-infinity norm: fixed-horizon impulse-response
// absolute sum, accumulated per input column by plain state propagation.
// Intentionally independent of the production norm path.
inline double brute_force_linf_norm(const StateSpace& sys, long samples) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(sys.n_out());
    for (Eigen::Index i = 0; i < sys.n_out(); ++i) {
        for (Eigen::Index j = 0; j < sys.n_in(); ++j) {
            rows(i) += std::abs(sys.D(i, j));
        }
    }
    for (Eigen::Index j = 0; j < sys.n_in(); ++j) {
        Eigen::VectorXd x = sys.B.col(j);
        for (long t = 1; t < samples; ++t) {
            const Eigen::VectorXd y = sys.C * x;
            for (Eigen::Index i = 0; i < sys.n_out(); ++i) {
                rows(i) += std::abs(y(i));
            }
            x = sys.A * x;
        }
    }
    return rows.size() ? rows.maxCoeff() : 0.0;
}

// Impulse response of num/den (descending powers of z) by polynomial long
// division: h_k = b_k - sum_{i=1..min(k,n)} a_i h_{k-i}.
inline std::vector<double> long_division_impulse(const std::vector<double>& num,
                                                 const std::vector<double>& den, int count) {
    const int n = static_cast<int>(den.size()) - 1;
    std::vector<double> a(n + 1);
    for (int i = 0; i <= n; ++i) {
        a[i] = den[static_cast<size_t>(i)] / den[0];
    }
    std::vector<double> b(static_cast<size_t>(count), 0.0);
    const int pad = n + 1 - static_cast<int>(num.size());
    for (size_t i = 0; i < num.size(); ++i) {
        if (pad + static_cast<int>(i) < count) {
            b[static_cast<size_t>(pad) + i] = num[i] / den[0];
        }
    }
    std::vector<double> h(static_cast<size_t>(count), 0.0);
    for (int k = 0; k < count; ++k) {
        double value = b[static_cast<size_t>(k)];
        for (int i = 1; i <= std::min(k, n); ++i) {
            value -= a[static_cast<size_t>(i)] * h[static_cast<size_t>(k - i)];
        }
        h[static_cast<size_t>(k)] = value;
    }
    return h;
}

// Central finite-difference gradient of the rollout cost.
inline Eigen::MatrixXd finite_difference_gradient(const FirGains& gains,
                                                  const DisturbanceHistory& hist,
                                                  const Eigen::MatrixXd& K,
                                                  const Eigen::MatrixXd& A,
                                                  const Eigen::MatrixXd& B,
                                                  const CostWeights& weights,
                                                  double step = 1e-6) {
    Eigen::MatrixXd grad(gains.M.rows(), gains.M.cols());
    for (Eigen::Index r = 0; r < gains.M.rows(); ++r) {
        for (Eigen::Index c = 0; c < gains.M.cols(); ++c) {
            FirGains plus = gains;
            FirGains minus = gains;
            plus.M(r, c) += step;
            minus.M(r, c) -= step;
            const double g_plus = ideal_cost(plus, hist, K, A, B, weights).first;
            const double g_minus = ideal_cost(minus, hist, K, A, B, weights).first;
            grad(r, c) = (g_plus - g_minus) / (2.0 * step);
        }
    }
    return grad;
}

// Random FIR gain trace with every entry inside the given norm ball.
inline std::vector<FirGains> random_gain_trace(std::mt19937& rng, Eigen::Index n_u,
                                               Eigen::Index n_x, int horizon, int length,
                                               double bound) {
    std::uniform_real_distribution<double> fill(0.05, 1.0);
    std::vector<FirGains> trace;
    trace.reserve(static_cast<size_t>(length));
    for (int t = 0; t < length; ++t) {
        Eigen::MatrixXd m = random_matrix(rng, n_u, n_x * horizon);
        const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
        if (norm > 0.0) {
            m *= bound * fill(rng) / norm;
        }
        trace.emplace_back(std::move(m), horizon);
    }
    return trace;
}

// The worked example loop used across the suites.
inline StateSpace example_plant() {
    return StateSpace(Eigen::MatrixXd::Constant(1, 1, 0.9), Eigen::MatrixXd::Constant(1, 1, 0.1),
                      Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(1, 1));
}

inline TransferFunctionSiso example_actuator_tf() {
    return TransferFunctionSiso{{0.1185, 0.1145}, {1.0, -1.672, 0.9048}};
}

inline StateSpace example_uncertainty() { return subtract_gain(tf_to_ss(example_actuator_tf()), 1.0); }

}  // namespace roco::testing

#include "roco/interconnection.hpp"

namespace roco::testing {

// A randomly drawn loop whose scaled small-gain test certifies it: plant,
// stabilizing gain, reconstructor estimator, uncertainty with its norm as
// the bound, and a FIR bound whose optimal scaled norm is at most 0.99.
struct CertifiedInstance {
    StateSpace plant;
    Eigen::MatrixXd K;
    StateSpace estimator;
    InterconnectionP P;
    StateSpace delta;
    double delta_norm = 0.0;
    double beta = 0.0;
    ScaleSearchResult scales;
};

inline CertifiedInstance make_certified_instance(std::mt19937& rng, int max_dim = 3) {
    std::uniform_int_distribution<int> dim(1, max_dim);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
        const Eigen::Index n_x = dim(rng);
        const Eigen::Index n_u = dim(rng);

        Eigen::MatrixXd A = random_matrix(rng, n_x, n_x);
        const double rho = A.eigenvalues().cwiseAbs().maxCoeff();
        if (rho > 0.0) {
            A *= (0.3 + 0.5 * unit(rng)) / rho;
        }
        const Eigen::MatrixXd B = random_matrix(rng, n_x, n_u);
        const StateSpace plant(A, B, Eigen::MatrixXd::Identity(n_x, n_x),
                               Eigen::MatrixXd::Zero(n_x, n_u));

        Eigen::MatrixXd K = 0.3 * random_matrix(rng, n_u, n_x);
        if ((A - B * K).eigenvalues().cwiseAbs().maxCoeff() >= 0.95) {
            K = Eigen::MatrixXd::Zero(n_u, n_x);
        }

        CertifiedInstance inst;
        inst.plant = plant;
        inst.K = K;
        inst.estimator = reconstructor_estimator(A, B);
        inst.P = build_interconnection(plant, K, inst.estimator);
        inst.delta = random_stable_system(rng, 2, 0.8, n_u, n_u);
        inst.delta_norm = induced_linf_norm(inst.delta).value;

        // Shrink the uncertainty until the dead-FIR loop is comfortably
        // certified, then pick a FIR bound inside the feasible range.
        bool ok = false;
        for (int shrink = 0; shrink < 60; ++shrink) {
            if (optimize_scales(inst.P, inst.delta_norm, 0.0).scaled_norm <= 0.9) {
                ok = true;
                break;
            }
            inst.delta.C *= 0.5;
            inst.delta.D *= 0.5;
            inst.delta_norm = induced_linf_norm(inst.delta).value;
        }
        if (!ok) {
            continue;
        }

        const StabilityReport report = max_beta(inst.P, inst.delta_norm, 1e-3, 50.0);
        inst.beta = report.beta_star * (0.3 + 0.6 * unit(rng));
        inst.scales = optimize_scales(inst.P, inst.delta_norm, inst.beta);
        while (inst.scales.scaled_norm > 0.99 && inst.beta > 1e-12) {
            inst.beta *= 0.5;
            inst.scales = optimize_scales(inst.P, inst.delta_norm, inst.beta);
        }
        if (inst.scales.scaled_norm <= 0.99 && inst.beta > 0.0) {
            return inst;
        }
    }
}

}  // namespace roco::testing
