#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "roco/interconnection.hpp"
#include "roco/oco.hpp"
#include "roco/state_space.hpp"

namespace roco {

/// Disturbance signal description.  `square` holds +amplitude through
/// switch_time and -amplitude afterwards; `constant` holds amplitude
/// throughout; `explicit_values` plays back a supplied sequence.
struct DisturbanceSpec {
    enum class Kind { square, constant, explicit_values };

    Kind kind = Kind::constant;
    double amplitude = 0.0;
    int switch_time = 0;
    std::vector<Eigen::VectorXd> values;
};

/// Everything defining one closed-loop run.
struct ExperimentConfig {
    StateSpace plant;                       // nominal dynamics; A, B drive the loop
    std::optional<StateSpace> uncertainty;  // input-multiplicative block, absent = perfect model
    Eigen::MatrixXd K;                      // baseline state-feedback gain, n_u x n_x
    int horizon = 1;                        // FIR learning horizon H
    double eta = 0.0;                       // learning rate (0 freezes the gains)
    CostWeights weights;
    std::optional<double> beta;  // FIR bound; absent = unconstrained
    int steps = 1;               // T; the run covers t = 0..T
    DisturbanceSpec disturbance;
    double divergence_threshold = 1e9;
    std::optional<Eigen::MatrixXd> initial_gains;  // M_0, zero when absent
};

/// Recorded trajectories of one run.  All series have one entry per
/// simulated step; a diverged run stops at the step that crossed the
/// threshold.
struct SimulationResult {
    std::vector<Eigen::VectorXd> x, u, u_base, u_oco, w_hat, d, p, q, v;
    std::vector<double> cost;       // c_t = x'Qx + u'Ru
    std::vector<double> gain_norm;  // ||M_t|| (induced inf) at each step
    double total_cost = 0.0;        // J_T over the recorded steps
    bool diverged = false;
    std::optional<int> divergence_step;
};

/// One row of a bound sweep; avg_cost is empty for diverged runs.
struct BetaSweepRow {
    std::optional<double> beta;  // empty encodes the unconstrained variant
    std::optional<double> avg_cost;
    bool diverged = false;
};

/// Materializes the disturbance sequence d_0..d_T with n_u entries each.
/// Throws std::invalid_argument for inconsistent specs (e.g. a switch time
/// outside (0, T) or an explicit sequence shorter than T + 1).
std::vector<Eigen::VectorXd> generate_disturbance(const DisturbanceSpec& spec, int steps,
                                                  Eigen::Index n_u);

/// Validates a config; throws std::invalid_argument describing the first
/// violation (also checks that K stabilizes the nominal plant).
void validate_config(const ExperimentConfig& config);

/// Runs the closed loop: estimate, learn, act, perturb, step.  Stops early
/// once the state infinity norm exceeds the divergence threshold.
SimulationResult simulate(const ExperimentConfig& config);

/// Runs simulate for each bound in `betas` on an otherwise identical
/// config.  A bound of exactly zero disables the learner, reproducing the
/// pure state-feedback loop.
std::vector<BetaSweepRow> beta_sweep(const ExperimentConfig& config,
                                     const std::vector<double>& betas);

/// Steps the interconnection P in feedback with the uncertainty block and
/// a prescribed FIR gain trace (steps past its end reuse the last entry),
/// returning the state output trajectory.  Used to validate the
/// interconnection against the physically wired loop.
std::vector<Eigen::VectorXd> simulate_lft(const InterconnectionP& P,
                                          const std::optional<StateSpace>& uncertainty,
                                          const std::vector<FirGains>& gain_trace,
                                          const std::vector<Eigen::VectorXd>& disturbance);

}  // namespace roco
