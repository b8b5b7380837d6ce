#include "roco/norms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace roco {

double vector_norm(const Eigen::VectorXd& v, double p) {
    if (v.size() == 0) {
        return 0.0;
    }
    if (p == 1.0) {
        return v.cwiseAbs().sum();
    }
    if (p == 2.0) {
        return v.norm();
    }
    if (std::isinf(p)) {
        return v.cwiseAbs().maxCoeff();
    }
    throw std::invalid_argument("vector_norm: p must be 1, 2 or inf");
}

double matrix_inf_norm(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.cols() == 0) {
        return 0.0;
    }
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double signal_linf_norm(const std::vector<Eigen::VectorXd>& signal) {
    double peak = 0.0;
    for (const Eigen::VectorXd& sample : signal) {
        if (sample.size() > 0) {
            peak = std::max(peak, sample.cwiseAbs().maxCoeff());
        }
    }
    return peak;
}

NormResult induced_linf_norm(const StateSpace& sys, double tol) {
    if (tol <= 0.0) {
        throw std::invalid_argument("induced_linf_norm: tol must be positive");
    }
    if (spectral_radius(sys) >= 1.0) {
        throw std::domain_error("unstable system: induced l-infinity norm is infinite");
    }

    // Per-output running row sums; the D term is the t = 0 sample.
    Eigen::VectorXd rows = sys.D.cwiseAbs().rowwise().sum();

    if (sys.n_state() == 0 || sys.n_in() == 0 || sys.n_out() == 0) {
        return NormResult{rows.size() ? rows.maxCoeff() : 0.0, 1, 0.0};
    }

    // Contraction certificate via repeated squaring: find 2^k with
    // ||A^{2^k}||_inf < 1.  Along the way Prod (1 + ||A^{2^i}||) bounds
    // sum_{r < 2^k} ||A^r||, so
    //   sum_{j>=0} ||A^j|| <= Prod / (1 - ||A^{2^k}||).
    Eigen::MatrixXd power = sys.A;
    double product_bound = 1.0;
    double contraction = matrix_inf_norm(power);
    int squarings = 0;
    while (contraction >= 1.0) {
        if (++squarings > 200 || !std::isfinite(contraction)) {
            throw std::domain_error(
                "induced_linf_norm: no contracting power of A found (system too close to "
                "instability)");
        }
        product_bound *= 1.0 + contraction;
        power = power * power;
        contraction = matrix_inf_norm(power);
    }
    const double tail_factor =
        matrix_inf_norm(sys.C) * product_bound / (1.0 - contraction);

    const long max_samples = 1000000;
    Eigen::MatrixXd w = sys.B;  // A^s B
    long s = 0;
    double tail = tail_factor * matrix_inf_norm(w);
    while (tail > tol / 2.0 && s < max_samples) {
        rows += (sys.C * w).cwiseAbs().rowwise().sum();
        w = sys.A * w;
        ++s;
        tail = tail_factor * matrix_inf_norm(w);
    }
    return NormResult{rows.maxCoeff(), s + 1, tail};
}

}  // namespace roco
