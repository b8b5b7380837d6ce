#include <doctest.h>

#include <random>

#include "roco/norms.hpp"
#include "roco/simulation.hpp"
#include "support.hpp"

using namespace roco;
using roco::testing::example_plant;
using roco::testing::example_uncertainty;
using roco::testing::make_certified_instance;
using roco::testing::random_matrix;

namespace {

ExperimentConfig example_config(bool imperfect) {
    ExperimentConfig c;
    c.plant = example_plant();
    if (imperfect) {
        c.uncertainty = example_uncertainty();
    }
    c.K = Eigen::MatrixXd::Constant(1, 1, 0.15);
    c.horizon = 1;
    c.eta = 5e-4;
    c.weights = CostWeights(Eigen::MatrixXd::Identity(1, 1),
                            Eigen::MatrixXd::Constant(1, 1, 0.1));
    c.steps = 1000;
    c.disturbance.kind = DisturbanceSpec::Kind::square;
    c.disturbance.amplitude = 100.0;
    c.disturbance.switch_time = 500;
    return c;
}

bool same_trajectories(const SimulationResult& a, const SimulationResult& b) {
    if (a.x.size() != b.x.size() || a.total_cost != b.total_cost) {
        return false;
    }
    for (size_t t = 0; t < a.x.size(); ++t) {
        if (a.x[t] != b.x[t] || a.u[t] != b.u[t] || a.cost[t] != b.cost[t]) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_SUITE_BEGIN("sim_harness");

TEST_CASE("generate_disturbance") {
    SUBCASE("square switches sign after the switch time") {
        DisturbanceSpec spec;
        spec.kind = DisturbanceSpec::Kind::square;
        spec.amplitude = 100.0;
        spec.switch_time = 500;
        const auto d = generate_disturbance(spec, 1000, 1);
        CHECK(d.size() == 1001);
        CHECK(d[0](0) == 100.0);
        CHECK(d[500](0) == 100.0);
        CHECK(d[501](0) == -100.0);
        CHECK(d[1000](0) == -100.0);
    }
    SUBCASE("zero amplitude square is identically zero") {
        DisturbanceSpec spec;
        spec.kind = DisturbanceSpec::Kind::square;
        spec.amplitude = 0.0;
        spec.switch_time = 2;
        for (const auto& v : generate_disturbance(spec, 5, 1)) {
            CHECK(v(0) == 0.0);
        }
    }
    SUBCASE("constant") {
        DisturbanceSpec spec;
        spec.kind = DisturbanceSpec::Kind::constant;
        spec.amplitude = 5.0;
        const auto d = generate_disturbance(spec, 3, 1);
        CHECK(d.size() == 4);
        for (const auto& v : d) {
            CHECK(v(0) == 5.0);
        }
    }
    SUBCASE("switch time must lie inside the run") {
        DisturbanceSpec spec;
        spec.kind = DisturbanceSpec::Kind::square;
        spec.amplitude = 1.0;
        spec.switch_time = 5;
        CHECK_THROWS_AS(generate_disturbance(spec, 5, 1), std::invalid_argument);
    }
    SUBCASE("explicit sequences must cover the run") {
        DisturbanceSpec spec;
        spec.kind = DisturbanceSpec::Kind::explicit_values;
        spec.values.assign(3, Eigen::VectorXd::Zero(1));
        CHECK_THROWS_AS(generate_disturbance(spec, 5, 1), std::invalid_argument);
    }
}

TEST_CASE("zero disturbance keeps the loop at the origin") {
    ExperimentConfig c = example_config(false);
    c.disturbance.kind = DisturbanceSpec::Kind::constant;
    c.disturbance.amplitude = 0.0;
    const SimulationResult r = simulate(c);
    CHECK(r.total_cost == 0.0);
    CHECK_FALSE(r.diverged);
    for (size_t t = 0; t < r.x.size(); ++t) {
        CHECK(r.x[t](0) == 0.0);
        CHECK(r.u[t](0) == 0.0);
    }
}

TEST_CASE("perfect-model run stays bounded and reconstructs the disturbance") {
    const SimulationResult r = simulate(example_config(false));
    CHECK_FALSE(r.diverged);
    CHECK(r.x.size() == 1001);
    for (size_t t = 1; t < r.w_hat.size(); ++t) {
        CHECK(std::abs(r.w_hat[t](0) - 0.1 * r.d[t - 1](0)) <= 1e-9);
    }
}

TEST_CASE("imperfect-model estimates carry the distortion channel") {
    const SimulationResult r = simulate(example_config(true));
    // w_hat_t = B (d_{t-1} + q_{t-1}) when the model is wrong.
    for (size_t t = 1; t < r.w_hat.size(); ++t) {
        const double expected = 0.1 * (r.d[t - 1](0) + r.q[t - 1](0));
        CHECK(r.w_hat[t](0) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("signal chain identities hold exactly") {
    const SimulationResult r = simulate(example_config(true));
    for (size_t t = 0; t < r.x.size(); ++t) {
        CHECK(r.p[t] == r.u[t] + r.d[t]);
        CHECK(r.v[t] == r.p[t] + r.q[t]);
        CHECK(r.u[t] == r.u_base[t] + r.u_oco[t]);
    }
}

TEST_CASE("identical configs give bit-identical results") {
    const SimulationResult a = simulate(example_config(true));
    const SimulationResult b = simulate(example_config(true));
    CHECK(same_trajectories(a, b));
}

TEST_CASE("frozen zero gains reproduce pure state feedback") {
    ExperimentConfig c = example_config(false);
    c.eta = 0.0;
    const SimulationResult r = simulate(c);

    // Hand-rolled state-feedback loop.
    double x = 0.0;
    for (size_t t = 0; t < r.x.size(); ++t) {
        CHECK(r.x[t](0) == x);
        const double u = -0.15 * x;
        CHECK(r.u[t](0) == u);
        x = 0.9 * x + 0.1 * (u + r.d[t](0));
    }
}

TEST_CASE("a zero bound disables the learner bit-for-bit") {
    ExperimentConfig frozen = example_config(true);
    frozen.eta = 0.0;
    ExperimentConfig clamped = example_config(true);
    clamped.beta = 0.0;
    CHECK(same_trajectories(simulate(frozen), simulate(clamped)));
}

TEST_CASE("an inactive bound reproduces the unconstrained run bit-for-bit") {
    const SimulationResult unconstrained = simulate(example_config(false));
    double sup = 0.0;
    for (double g : unconstrained.gain_norm) {
        sup = std::max(sup, g);
    }
    ExperimentConfig c = example_config(false);
    c.beta = sup * 2.0;
    CHECK(same_trajectories(unconstrained, simulate(c)));
}

TEST_CASE("beta_sweep rows mirror individual runs") {
    ExperimentConfig c = example_config(false);
    c.steps = 300;
    c.disturbance.switch_time = 150;
    const auto rows = beta_sweep(c, {0.0, 0.5, 10.0});
    CHECK(rows.size() == 3);

    ExperimentConfig frozen = c;
    frozen.eta = 0.0;
    const SimulationResult sf = simulate(frozen);
    CHECK(rows[0].avg_cost == sf.total_cost / c.steps);

    ExperimentConfig unconstrained = c;
    const SimulationResult uoco = simulate(unconstrained);
    CHECK(rows[2].avg_cost == uoco.total_cost / c.steps);
}

TEST_CASE("divergence stops the run and records the step") {
    ExperimentConfig c = example_config(false);
    c.divergence_threshold = 50.0;  // the state passes 50 on the way to ~87
    const SimulationResult r = simulate(c);
    CHECK(r.diverged);
    REQUIRE(r.divergence_step.has_value());
    CHECK(r.x.size() == static_cast<size_t>(*r.divergence_step) + 1);
    CHECK(r.x.back().cwiseAbs().maxCoeff() > 50.0);

    double total = 0.0;
    for (double ct : r.cost) {
        total += ct;
    }
    CHECK(r.total_cost == total);
}

TEST_CASE("runaway learning diverges only with the corrupted estimates") {
    // At an aggressive learning rate the estimate corruption closes an
    // unstable loop through the gain update; the exogenous perfect-model
    // estimates keep the same rate contractive.
    ExperimentConfig imperfect = example_config(true);
    imperfect.eta = 5e-2;
    const SimulationResult ri = simulate(imperfect);
    CHECK(ri.diverged);
    REQUIRE(ri.divergence_step.has_value());
    CHECK(*ri.divergence_step < 1000);

    ExperimentConfig perfect = example_config(false);
    perfect.eta = 5e-2;
    CHECK_FALSE(simulate(perfect).diverged);

    // The norm-ball projection contains the runaway.
    ExperimentConfig constrained = example_config(true);
    constrained.eta = 5e-2;
    constrained.beta = 1.5;
    const SimulationResult rc = simulate(constrained);
    CHECK_FALSE(rc.diverged);
    for (double g : rc.gain_norm) {
        CHECK(g <= 1.5 + 1e-12);
    }
}

TEST_CASE("constrained gains respect the bound at every step") {
    ExperimentConfig c = example_config(true);
    c.beta = 0.25;
    const SimulationResult r = simulate(c);
    for (double g : r.gain_norm) {
        CHECK(g <= 0.25 + 1e-12);
    }
}

TEST_CASE("config validation rejects a destabilizing baseline gain") {
    ExperimentConfig c = example_config(false);
    c.K = Eigen::MatrixXd::Constant(1, 1, -5.0);
    CHECK_THROWS_AS(simulate(c), std::invalid_argument);
}

TEST_CASE("wired loop and interconnection produce the same state trajectory") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        const auto inst = make_certified_instance(rng);
        const int T = 500;
        const int H = 2;

        Eigen::MatrixXd m = random_matrix(rng, inst.P.n_u, inst.P.n_x * H);
        const double norm = matrix_inf_norm(m);
        if (norm > 0.0) {
            m *= inst.beta / norm;
        }

        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        std::vector<Eigen::VectorXd> d;
        for (int t = 0; t <= T; ++t) {
            d.push_back(Eigen::VectorXd::NullaryExpr(
                inst.P.n_u, [&](Eigen::Index) { return unit(rng); }));
        }

        ExperimentConfig config;
        config.plant = inst.plant;
        config.uncertainty = inst.delta;
        config.K = inst.K;
        config.horizon = H;
        config.eta = 0.0;
        config.weights = CostWeights(Eigen::MatrixXd::Identity(inst.P.n_x, inst.P.n_x),
                                     Eigen::MatrixXd::Identity(inst.P.n_u, inst.P.n_u));
        config.steps = T;
        config.disturbance.kind = DisturbanceSpec::Kind::explicit_values;
        config.disturbance.values = d;
        config.initial_gains = m;

        const SimulationResult wired = simulate(config);
        const auto lft = simulate_lft(inst.P, inst.delta, {FirGains(m, H)}, d);

        REQUIRE(wired.x.size() == lft.size());
        double worst = 0.0;
        for (size_t t = 0; t < lft.size(); ++t) {
            worst = std::max(worst, (wired.x[t] - lft[t]).cwiseAbs().maxCoeff());
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_SUITE_END();
