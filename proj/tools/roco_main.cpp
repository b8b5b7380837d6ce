#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "roco/config.hpp"
#include "roco/interconnection.hpp"
#include "roco/norms.hpp"
#include "roco/report.hpp"
#include "roco/simulation.hpp"
#include "roco/svg_plot.hpp"

namespace {

namespace fs = std::filesystem;

std::vector<double> scalar_series(const std::vector<Eigen::VectorXd>& signal) {
    std::vector<double> out;
    out.reserve(signal.size());
    for (const auto& v : signal) {
        out.push_back(v.size() > 0 ? v(0) : 0.0);
    }
    return out;
}

std::vector<double> time_axis(size_t count) {
    std::vector<double> t(count);
    for (size_t i = 0; i < count; ++i) {
        t[i] = static_cast<double>(i);
    }
    return t;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, bool plot) {
    const roco::ConfigFile config = roco::ConfigFile::parse_file(config_path);
    const roco::ExperimentConfig experiment = roco::experiment_from_config(config);
    const roco::SimulationResult result = roco::simulate(experiment);

    fs::create_directories(out_dir);
    roco::write_trajectory_csv((fs::path(out_dir) / "trajectory.csv").string(), result);
    roco::write_summary((fs::path(out_dir) / "summary.txt").string(), result);
    if (plot) {
        const std::vector<double> t = time_axis(result.cost.size());
        roco::write_line_chart_svg((fs::path(out_dir) / "cost.svg").string(), "per-step cost",
                                   "t", "cost", t, result.cost);
        roco::write_line_chart_svg((fs::path(out_dir) / "w_hat.svg").string(),
                                   "disturbance estimate", "t", "w_hat", t,
                                   scalar_series(result.w_hat));
    }

    std::printf("J_T = %s\n", roco::format_double(result.total_cost).c_str());
    std::printf("diverged = %s\n", result.diverged ? "true" : "false");
    if (result.divergence_step) {
        std::printf("t_div = %d\n", *result.divergence_step);
    }
    return 0;
}

int cmd_sweep_beta(const std::string& config_path, const std::string& betas_flag,
                   const std::string& out_dir) {
    const roco::ConfigFile config = roco::ConfigFile::parse_file(config_path);
    const roco::ExperimentConfig experiment = roco::experiment_from_config(config);

    std::vector<double> betas;
    if (!betas_flag.empty()) {
        betas = roco::parse_number_list(betas_flag);
    } else if (auto from_config = roco::betas_from_config(config)) {
        betas = *from_config;
    } else {
        std::fprintf(stderr, "error: no beta list given (use --betas or a 'betas' config key)\n");
        return 1;
    }

    const std::vector<roco::BetaSweepRow> rows = roco::beta_sweep(experiment, betas);
    fs::create_directories(out_dir);
    roco::write_sweep_csv((fs::path(out_dir) / "sweep.csv").string(), rows);
    for (const auto& row : rows) {
        std::printf("beta = %-10s avg_cost = %s\n", roco::format_double(*row.beta).c_str(),
                    row.avg_cost ? roco::format_double(*row.avg_cost).c_str() : "diverged");
    }
    return 0;
}

int cmd_stability_bound(const std::string& config_path, double tol,
                        const std::string& trace_path) {
    const roco::ConfigFile config = roco::ConfigFile::parse_file(config_path);
    const roco::StabilityInputs inputs = roco::stability_inputs_from_config(config);

    double delta = 0.0;
    if (inputs.delta) {
        delta = *inputs.delta;
    } else {
        delta = roco::induced_linf_norm(*inputs.uncertainty).value;
    }

    const roco::StateSpace estimator =
        roco::reconstructor_estimator(inputs.plant.A, inputs.plant.B);
    const roco::InterconnectionP P =
        roco::build_interconnection(inputs.plant, inputs.K, estimator);
    const roco::StabilityReport report = roco::max_beta(P, delta, tol, inputs.beta_cap);

    std::printf("delta       = %s\n", roco::format_double(report.delta_bound).c_str());
    if (report.unbounded) {
        std::printf("beta_star   = unbounded (certified through cap %s)\n",
                    roco::format_double(inputs.beta_cap).c_str());
    } else {
        std::printf("beta_star   = %s\n", roco::format_double(report.beta_star).c_str());
    }
    std::printf("d1, d2      = %s, %s\n", roco::format_double(report.scales.d1).c_str(),
                roco::format_double(report.scales.d2).c_str());
    std::printf("scaled_norm = %s\n", roco::format_double(report.scales.scaled_norm).c_str());
    std::printf("certified   = %s\n", report.certified ? "true" : "false");

    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) {
            std::fprintf(stderr, "error: cannot write '%s'\n", trace_path.c_str());
            return 1;
        }
        out << "beta,d2,scaled_norm,feasible\n";
        for (const auto& probe : report.trace) {
            out << roco::format_double(probe.beta) << ',' << roco::format_double(probe.d2) << ','
                << roco::format_double(probe.scaled_norm) << ','
                << (probe.feasible ? "true" : "false") << '\n';
        }
    }
    return 0;
}

int cmd_norm(const std::string& config_path, const std::string& num_flag,
             const std::string& den_flag, double tol) {
    roco::StateSpace sys;
    if (!num_flag.empty() || !den_flag.empty()) {
        roco::TransferFunctionSiso tf;
        tf.num = roco::parse_number_list(num_flag);
        tf.den = roco::parse_number_list(den_flag);
        sys = roco::tf_to_ss(tf);
    } else if (!config_path.empty()) {
        const roco::ConfigFile config = roco::ConfigFile::parse_file(config_path);
        if (auto delta = roco::uncertainty_from_config(config)) {
            sys = *delta;
        } else {
            sys = roco::plant_from_config(config);
        }
    } else {
        std::fprintf(stderr, "error: give --num/--den or --config\n");
        return 1;
    }

    try {
        const roco::NormResult result = roco::induced_linf_norm(sys, tol);
        std::printf("norm       = %s\n", roco::format_double(result.value).c_str());
        std::printf("horizon    = %ld\n", result.truncation_horizon);
        std::printf("tail_bound = %s\n", roco::format_double(result.tail_bound).c_str());
    } catch (const std::domain_error&) {
        std::fprintf(stderr, "error: infinite induced norm (system is not stable)\n");
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust OCO disturbance-rejection control experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string betas_flag;
    std::string trace_path;
    std::string num_flag;
    std::string den_flag;
    double tol = 1e-3;
    double norm_tol = 1e-9;
    bool plot = false;

    CLI::App* simulate = app.add_subcommand("simulate", "run one closed-loop experiment");
    simulate->add_option("--config", config_path, "experiment config file")->required();
    simulate->add_option("--out", out_dir, "output directory");
    simulate->add_flag("--plot", plot, "also write cost.svg and w_hat.svg");

    CLI::App* sweep = app.add_subcommand("sweep-beta", "run the experiment over a list of bounds");
    sweep->add_option("--config", config_path, "experiment config file")->required();
    sweep->add_option("--betas", betas_flag, "comma-separated bound list");
    sweep->add_option("--out", out_dir, "output directory");

    CLI::App* bound = app.add_subcommand("stability-bound",
                                         "maximal certified FIR bound for a config");
    bound->add_option("--config", config_path, "config with plant, K and uncertainty/delta")
        ->required();
    bound->add_option("--tol", tol, "relative bisection tolerance");
    bound->add_option("--trace", trace_path, "write the bisection trace CSV here");

    CLI::App* norm = app.add_subcommand("norm", "induced l-infinity norm of a system");
    norm->add_option("--config", config_path, "config providing the system");
    norm->add_option("--num", num_flag, "transfer function numerator, comma separated");
    norm->add_option("--den", den_flag, "transfer function denominator, comma separated");
    norm->add_option("--tol", norm_tol, "norm truncation tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            return cmd_simulate(config_path, out_dir, plot);
        }
        if (sweep->parsed()) {
            return cmd_sweep_beta(config_path, betas_flag, out_dir);
        }
        if (bound->parsed()) {
            return cmd_stability_bound(config_path, tol, trace_path);
        }
        if (norm->parsed()) {
            return cmd_norm(config_path, num_flag, den_flag, norm_tol);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
