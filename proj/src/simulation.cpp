#include "roco/simulation.hpp"

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

std::vector<Eigen::VectorXd> generate_disturbance(const DisturbanceSpec& spec, int steps,
                                                  Eigen::Index n_u) {
    require(steps >= 1, "disturbance: horizon must be at least 1");
    std::vector<Eigen::VectorXd> d;
    d.reserve(static_cast<size_t>(steps) + 1);
    switch (spec.kind) {
        case DisturbanceSpec::Kind::square: {
            require(spec.switch_time > 0 && spec.switch_time < steps,
                    "disturbance: square switch time must lie strictly inside (0, T)");
            const Eigen::VectorXd high = Eigen::VectorXd::Constant(n_u, spec.amplitude);
            const Eigen::VectorXd low = Eigen::VectorXd::Constant(n_u, -spec.amplitude);
            for (int t = 0; t <= steps; ++t) {
                d.push_back(t <= spec.switch_time ? high : low);
            }
            break;
        }
        case DisturbanceSpec::Kind::constant: {
            const Eigen::VectorXd level = Eigen::VectorXd::Constant(n_u, spec.amplitude);
            for (int t = 0; t <= steps; ++t) {
                d.push_back(level);
            }
            break;
        }
        case DisturbanceSpec::Kind::explicit_values: {
            require(spec.values.size() >= static_cast<size_t>(steps) + 1,
                    "disturbance: explicit sequence shorter than the run");
            for (int t = 0; t <= steps; ++t) {
                require(spec.values[static_cast<size_t>(t)].size() == n_u,
                        "disturbance: explicit value dimension mismatch");
                d.push_back(spec.values[static_cast<size_t>(t)]);
            }
            break;
        }
    }
    return d;
}

void validate_config(const ExperimentConfig& config) {
    const Eigen::Index n_x = config.plant.n_state();
    const Eigen::Index n_u = config.plant.B.cols();
    require(n_x > 0, "config: plant must have at least one state");
    require(config.K.rows() == n_u && config.K.cols() == n_x, "config: K must be n_u x n_x");
    require(config.horizon >= 1, "config: learning horizon must be at least 1");
    require(config.eta >= 0.0, "config: learning rate must be nonnegative");
    require(config.steps >= 1, "config: T must be at least 1");
    require(config.divergence_threshold > 0.0, "config: divergence threshold must be positive");
    require(config.weights.Q.rows() == n_x, "config: Q must be n_x x n_x");
    require(config.weights.R.rows() == n_u, "config: R must be n_u x n_u");
    if (config.beta) {
        require(*config.beta >= 0.0, "config: beta must be nonnegative");
    }
    if (config.uncertainty) {
        require(config.uncertainty->n_in() == n_u && config.uncertainty->n_out() == n_u,
                "config: uncertainty block must map the plant input channel to itself");
    }
    if (config.initial_gains) {
        require(config.initial_gains->rows() == n_u &&
                    config.initial_gains->cols() == n_x * config.horizon,
                "config: M0 must be n_u x (n_x * H)");
    }
    StateSpace closed(config.plant.A - config.plant.B * config.K,
                      Eigen::MatrixXd::Zero(n_x, 0), Eigen::MatrixXd::Zero(0, n_x),
                      Eigen::MatrixXd::Zero(0, 0));
    require(spectral_radius(closed) < 1.0, "config: K does not stabilize the nominal plant");
}

SimulationResult simulate(const ExperimentConfig& config) {
    validate_config(config);

    const Eigen::MatrixXd& A = config.plant.A;
    const Eigen::MatrixXd& B = config.plant.B;
    const Eigen::Index n_x = A.rows();
    const Eigen::Index n_u = B.cols();
    const int H = config.horizon;
    const int T = config.steps;

    const std::vector<Eigen::VectorXd> d = generate_disturbance(config.disturbance, T, n_u);

    // A bound of zero pins the gains to the origin; skip the learner so the
    // run reproduces pure state feedback exactly.
    const bool learner_disabled = config.eta == 0.0 || (config.beta && *config.beta == 0.0);
    FirGains gains = (config.initial_gains && !(config.beta && *config.beta == 0.0))
                         ? FirGains(*config.initial_gains, H)
                         : FirGains::zero(n_u, n_x, H);

    DisturbanceHistory hist(n_x, 2 * H);
    EstimatorMemory mem = EstimatorMemory::zero(n_x, n_u);
    std::optional<SystemSimulator> delta;
    if (config.uncertainty) {
        delta.emplace(*config.uncertainty);
    }

    SimulationResult result;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_x);
    const Eigen::VectorXd zero_q = Eigen::VectorXd::Zero(n_u);

    for (int t = 0; t <= T; ++t) {
        const Eigen::VectorXd w_hat = estimate_disturbance(mem, x, A, B);
        hist.push(w_hat);

        if (!learner_disabled && t >= H) {
            const Eigen::MatrixXd grad =
                ideal_cost_gradient(gains, hist, config.K, A, B, config.weights);
            gains = opgd_update(gains, grad, config.eta, config.beta);
        }

        const Eigen::VectorXd u_oco = fir_output(gains, hist);
        const Eigen::VectorXd u_base = -config.K * x;
        const Eigen::VectorXd u = u_base + u_oco;
        const Eigen::VectorXd p = u + d[static_cast<size_t>(t)];
        const Eigen::VectorXd q = delta ? delta->step(p) : zero_q;
        const Eigen::VectorXd v = p + q;
        const double c = x.dot(config.weights.Q * x) + u.dot(config.weights.R * u);

        result.x.push_back(x);
        result.u.push_back(u);
        result.u_base.push_back(u_base);
        result.u_oco.push_back(u_oco);
        result.w_hat.push_back(w_hat);
        result.d.push_back(d[static_cast<size_t>(t)]);
        result.p.push_back(p);
        result.q.push_back(q);
        result.v.push_back(v);
        result.cost.push_back(c);
        result.gain_norm.push_back(matrix_inf_norm(gains.M));
        result.total_cost += c;

        // Negated form so non-finite states also count as divergence.
        if (!(x.cwiseAbs().maxCoeff() <= config.divergence_threshold)) {
            result.diverged = true;
            result.divergence_step = t;
            break;
        }

        mem.advance(x, u);
        x = A * x + B * v;
    }
    return result;
}

std::vector<BetaSweepRow> beta_sweep(const ExperimentConfig& config,
                                     const std::vector<double>& betas) {
    require(!betas.empty(), "beta_sweep: empty bound list");
    std::vector<BetaSweepRow> rows;
    rows.reserve(betas.size());
    for (double beta : betas) {
        require(beta >= 0.0, "beta_sweep: bounds must be nonnegative");
        ExperimentConfig run = config;
        run.beta = beta;
        const SimulationResult r = simulate(run);
        BetaSweepRow row;
        row.beta = beta;
        row.diverged = r.diverged;
        if (!r.diverged) {
            row.avg_cost = r.total_cost / config.steps;
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<Eigen::VectorXd> simulate_lft(const InterconnectionP& P,
                                          const std::optional<StateSpace>& uncertainty,
                                          const std::vector<FirGains>& gain_trace,
                                          const std::vector<Eigen::VectorXd>& disturbance) {
    require(!gain_trace.empty(), "simulate_lft: empty gain trace");
    const Eigen::Index n_u = P.n_u;
    const Eigen::Index n_x = P.n_x;
    require(gain_trace.front().n_u() == n_u && gain_trace.front().n_x() == n_x,
            "simulate_lft: gain shape does not match the interconnection");
    if (uncertainty) {
        require(uncertainty->n_in() == n_u && uncertainty->n_out() == n_u,
                "simulate_lft: uncertainty block channel mismatch");
    }
    // The feedback evaluation below needs p and w_hat free of same-step
    // dependence on q, and w_hat free of same-step dependence on u_oco.
    require(P.sys.D.block(0, 0, n_u + n_x, n_u).isZero(0.0) &&
                P.sys.D.block(n_u, n_u, n_x, n_u).isZero(0.0) &&
                P.sys.D.bottomRows(n_x).isZero(0.0),
            "simulate_lft: interconnection has an algebraic feedback loop");

    const int H = gain_trace.front().horizon;
    DisturbanceHistory hist(n_x, H);
    std::optional<SystemSimulator> delta;
    if (uncertainty) {
        delta.emplace(*uncertainty);
    }

    Eigen::VectorXd xp = Eigen::VectorXd::Zero(P.sys.n_state());
    const Eigen::VectorXd zero_q = Eigen::VectorXd::Zero(n_u);
    std::vector<Eigen::VectorXd> state_out;
    state_out.reserve(disturbance.size());

    for (size_t t = 0; t < disturbance.size(); ++t) {
        const Eigen::VectorXd& d = disturbance[t];
        require(d.size() == n_u, "simulate_lft: disturbance dimension mismatch");

        const Eigen::VectorXd from_state = P.sys.C * xp;
        const Eigen::VectorXd w_hat = from_state.segment(n_u, n_x);
        hist.push(w_hat);

        const FirGains& gains = gain_trace[std::min(t, gain_trace.size() - 1)];
        const Eigen::VectorXd u_oco = fir_output(gains, hist);
        const Eigen::VectorXd p = from_state.head(n_u) +
                                  P.sys.D.block(0, n_u, n_u, n_u) * u_oco +
                                  P.sys.D.block(0, 2 * n_u, n_u, n_u) * d;
        const Eigen::VectorXd q = delta ? delta->step(p) : zero_q;

        state_out.push_back(from_state.tail(n_x));

        Eigen::VectorXd input(3 * n_u);
        input << q, u_oco, d;
        xp = P.sys.A * xp + P.sys.B * input;
    }
    return state_out;
}

}  // namespace roco
