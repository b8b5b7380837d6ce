#include "roco/interconnection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roco {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) {
        throw std::invalid_argument(msg);
    }
}

// Subsystem keeping a contiguous output row range and input column range.
StateSpace select_channels(const StateSpace& sys, Eigen::Index row0, Eigen::Index rows,
                           Eigen::Index col0, Eigen::Index cols) {
    return StateSpace(sys.A, sys.B.middleCols(col0, cols), sys.C.middleRows(row0, rows),
                      sys.D.block(row0, col0, rows, cols));
}

}  // namespace

InterconnectionP::InterconnectionP(StateSpace sys_, Eigen::Index n_u_, Eigen::Index n_x_,
                                   Eigen::Index n_e_)
    : sys(std::move(sys_)), n_u(n_u_), n_x(n_x_), n_e(n_e_) {
    require(sys.n_in() == 3 * n_u, "interconnection: expected inputs [q; u_oco; d]");
    require(sys.n_out() == n_u + 2 * n_x, "interconnection: expected outputs [p; w_hat; x]");
    require(sys.n_state() == n_x + n_e, "interconnection: state must be plant + estimator state");
}

StateSpace InterconnectionP::p11() const { return select_channels(sys, 0, n_u + n_x, 0, 2 * n_u); }
StateSpace InterconnectionP::p12() const {
    return select_channels(sys, 0, n_u + n_x, 2 * n_u, n_u);
}
StateSpace InterconnectionP::p21() const {
    return select_channels(sys, n_u + n_x, n_x, 0, 2 * n_u);
}
StateSpace InterconnectionP::p22() const {
    return select_channels(sys, n_u + n_x, n_x, 2 * n_u, n_u);
}

StateSpace reconstructor_estimator(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    require(A.rows() == A.cols(), "reconstructor_estimator: A must be square");
    require(B.rows() == A.rows(), "reconstructor_estimator: B rows must match A");
    const Eigen::Index n_x = A.rows();
    const Eigen::Index n_u = B.cols();
    Eigen::MatrixXd Be(n_x, n_x + n_u);
    Be << -A, -B;
    Eigen::MatrixXd De = Eigen::MatrixXd::Zero(n_x, n_x + n_u);
    De.leftCols(n_x) = Eigen::MatrixXd::Identity(n_x, n_x);
    return StateSpace(Eigen::MatrixXd::Zero(n_x, n_x), Be, Eigen::MatrixXd::Identity(n_x, n_x),
                      De);
}

InterconnectionP build_interconnection(const StateSpace& plant, const Eigen::MatrixXd& K,
                                       const StateSpace& estimator) {
    const Eigen::Index n_x = plant.n_state();
    const Eigen::Index n_u = plant.B.cols();
    const Eigen::Index n_e = estimator.n_state();
    require(n_x > 0, "build_interconnection: plant must have at least one state");
    require(K.rows() == n_u && K.cols() == n_x, "build_interconnection: K must be n_u x n_x");
    require(estimator.n_in() == n_x + n_u,
            "build_interconnection: estimator inputs must be [x; u]");
    require(estimator.n_out() == n_x, "build_interconnection: estimator output must be w_hat");

    const Eigen::MatrixXd& A = plant.A;
    const Eigen::MatrixXd& B = plant.B;
    const Eigen::MatrixXd Be1 = estimator.B.leftCols(n_x);
    const Eigen::MatrixXd Be2 = estimator.B.rightCols(n_u);
    const Eigen::MatrixXd De1 = estimator.D.leftCols(n_x);
    const Eigen::MatrixXd De2 = estimator.D.rightCols(n_u);

    Eigen::MatrixXd Ap = Eigen::MatrixXd::Zero(n_x + n_e, n_x + n_e);
    Ap.topLeftCorner(n_x, n_x) = A - B * K;
    Ap.bottomLeftCorner(n_e, n_x) = Be1 - Be2 * K;
    Ap.bottomRightCorner(n_e, n_e) = estimator.A;

    Eigen::MatrixXd Bp = Eigen::MatrixXd::Zero(n_x + n_e, 3 * n_u);
    Bp.topLeftCorner(n_x, n_u) = B;
    Bp.block(0, n_u, n_x, n_u) = B;
    Bp.block(0, 2 * n_u, n_x, n_u) = B;
    Bp.block(n_x, n_u, n_e, n_u) = Be2;

    Eigen::MatrixXd Cp = Eigen::MatrixXd::Zero(n_u + 2 * n_x, n_x + n_e);
    Cp.topLeftCorner(n_u, n_x) = -K;
    Cp.block(n_u, 0, n_x, n_x) = De1 - De2 * K;
    Cp.block(n_u, n_x, n_x, n_e) = estimator.C;
    Cp.block(n_u + n_x, 0, n_x, n_x) = Eigen::MatrixXd::Identity(n_x, n_x);

    Eigen::MatrixXd Dp = Eigen::MatrixXd::Zero(n_u + 2 * n_x, 3 * n_u);
    Dp.block(0, n_u, n_u, n_u) = Eigen::MatrixXd::Identity(n_u, n_u);
    Dp.block(0, 2 * n_u, n_u, n_u) = Eigen::MatrixXd::Identity(n_u, n_u);
    Dp.block(n_u, n_u, n_x, n_u) = De2;

    StateSpace sys(std::move(Ap), std::move(Bp), std::move(Cp), std::move(Dp));
    if (spectral_radius(sys) >= 1.0) {
        throw std::domain_error("baseline not stabilizing: interconnection A matrix is unstable");
    }
    return InterconnectionP(std::move(sys), n_u, n_x, n_e);
}

StateSpace scaled_p11(const InterconnectionP& P, double delta, double beta, double d1, double d2) {
    require(d1 > 0.0 && d2 > 0.0, "scaled_p11: scales must be positive");
    require(delta >= 0.0 && beta >= 0.0, "scaled_p11: delta and beta must be nonnegative");
    StateSpace p11 = P.p11();
    // Input columns pick up d1*delta (q) and d2*beta (u_oco); output rows
    // pick up 1/d1 (p) and 1/d2 (w_hat).
    p11.B.leftCols(P.n_u) *= d1 * delta;
    p11.B.rightCols(P.n_u) *= d2 * beta;
    p11.C.topRows(P.n_u) /= d1;
    p11.C.bottomRows(P.n_x) /= d2;
    p11.D.leftCols(P.n_u) *= d1 * delta;
    p11.D.rightCols(P.n_u) *= d2 * beta;
    p11.D.topRows(P.n_u) /= d1;
    p11.D.bottomRows(P.n_x) /= d2;
    return p11;
}

double scaled_norm(const InterconnectionP& P, double delta, double beta, double d1, double d2,
                   double tol) {
    return induced_linf_norm(scaled_p11(P, delta, beta, d1, d2), tol).value;
}

ScaleSearchResult optimize_scales(const InterconnectionP& P, double delta, double beta,
                                  double norm_tol) {
    const auto objective = [&](double log_d2) {
        return scaled_norm(P, delta, beta, 1.0, std::pow(10.0, log_d2), norm_tol);
    };

    // d2 = 1 is the incumbent so the result never exceeds the unscaled norm.
    double best_log = 0.0;
    double best_val = objective(0.0);

    const double lo = -6.0, hi = 6.0;
    const int grid_points = 25;
    for (int i = 0; i < grid_points; ++i) {
        const double log_d2 = lo + (hi - lo) * i / (grid_points - 1);
        const double val = objective(log_d2);
        if (val < best_val) {
            best_val = val;
            best_log = log_d2;
        }
    }

    // Golden-section refinement around the best grid point.
    double a = std::max(lo, best_log - 0.5);
    double b = std::min(hi, best_log + 0.5);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > 1e-4) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        }
        const double fbest = std::min(f1, f2);
        if (fbest < best_val) {
            best_val = fbest;
            best_log = (f1 <= f2) ? x1 : x2;
        }
    }

    return ScaleSearchResult{1.0, std::pow(10.0, best_log), best_val};
}

namespace {

// Strict-inequality margin required by the scaled small-gain condition.
constexpr double kCertifyMargin = 1e-6;

bool is_certified(double norm) { return norm <= 1.0 - kCertifyMargin; }

}  // namespace

StabilityReport max_beta(const InterconnectionP& P, double delta, double tol, double beta_cap) {
    require(delta >= 0.0, "max_beta: delta must be nonnegative");
    require(tol > 0.0, "max_beta: tol must be positive");
    require(beta_cap > 0.0, "max_beta: beta_cap must be positive");

    StabilityReport report;
    report.delta_bound = delta;

    const auto probe = [&](double beta) {
        ScaleSearchResult r = optimize_scales(P, delta, beta);
        report.trace.push_back(BetaProbe{beta, r.d2, r.scaled_norm, is_certified(r.scaled_norm)});
        return r;
    };

    ScaleSearchResult at_cap = probe(beta_cap);
    if (is_certified(at_cap.scaled_norm)) {
        report.beta_star = beta_cap;
        report.unbounded = true;
        report.scales = at_cap;
        report.certified = true;
        return report;
    }

    ScaleSearchResult at_zero = probe(0.0);
    if (!is_certified(at_zero.scaled_norm)) {
        report.beta_star = 0.0;
        report.scales = at_zero;
        report.certified = false;
        return report;
    }

    // Bracket: double upward from 1 until infeasible, then bisect.
    double lo = 0.0;
    ScaleSearchResult at_lo = at_zero;
    double hi = std::min(1.0, beta_cap);
    while (hi < beta_cap) {
        ScaleSearchResult r = probe(hi);
        if (!is_certified(r.scaled_norm)) {
            break;
        }
        lo = hi;
        at_lo = r;
        hi = std::min(hi * 2.0, beta_cap);
    }

    while (hi - lo > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        ScaleSearchResult r = probe(mid);
        if (is_certified(r.scaled_norm)) {
            lo = mid;
            at_lo = r;
        } else {
            hi = mid;
        }
    }

    report.beta_star = lo;
    report.scales = at_lo;
    report.certified = is_certified(at_lo.scaled_norm);
    return report;
}

double closed_loop_gain_bound(const InterconnectionP& P, double delta, double beta, double d1,
                              double d2, double tol) {
    const double p11_norm = scaled_norm(P, delta, beta, d1, d2, tol);
    if (p11_norm >= 1.0) {
        throw std::domain_error("closed_loop_gain_bound: scaled norm is not below one");
    }

    StateSpace p12 = P.p12();
    p12.C.topRows(P.n_u) /= d1;
    p12.C.bottomRows(P.n_x) /= d2;
    p12.D.topRows(P.n_u) /= d1;
    p12.D.bottomRows(P.n_x) /= d2;

    StateSpace p21 = P.p21();
    p21.B.leftCols(P.n_u) *= d1 * delta;
    p21.B.rightCols(P.n_u) *= d2 * beta;
    p21.D.leftCols(P.n_u) *= d1 * delta;
    p21.D.rightCols(P.n_u) *= d2 * beta;

    const double n12 = induced_linf_norm(p12, tol).value;
    const double n21 = induced_linf_norm(p21, tol).value;
    const double n22 = induced_linf_norm(P.p22(), tol).value;
    return n22 + n21 * n12 / (1.0 - p11_norm);
}

}  // namespace roco
