#include "roco/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace roco {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write file '" + path + "'");
    }
    return out;
}

void append_header(std::string& line, const std::string& name, Eigen::Index dim) {
    for (Eigen::Index i = 0; i < dim; ++i) {
        line += ',';
        line += name;
        if (dim > 1) {
            line += std::to_string(i);
        }
    }
}

void append_values(std::string& line, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        line += ',';
        line += format_double(v(i));
    }
}

}  // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_trajectory_csv(const std::string& path, const SimulationResult& result) {
    std::ofstream out = open_out(path);
    if (result.x.empty()) {
        throw std::invalid_argument("trajectory csv: empty result");
    }
    const Eigen::Index n_x = result.x.front().size();
    const Eigen::Index n_u = result.u.front().size();

    std::string header = "t";
    append_header(header, "x", n_x);
    append_header(header, "u", n_u);
    append_header(header, "u_base", n_u);
    append_header(header, "u_oco", n_u);
    append_header(header, "w_hat", n_x);
    append_header(header, "d", n_u);
    append_header(header, "p", n_u);
    append_header(header, "q", n_u);
    append_header(header, "v", n_u);
    header += ",cost,m_norm";
    out << header << '\n';

    for (size_t t = 0; t < result.x.size(); ++t) {
        std::string line = std::to_string(t);
        append_values(line, result.x[t]);
        append_values(line, result.u[t]);
        append_values(line, result.u_base[t]);
        append_values(line, result.u_oco[t]);
        append_values(line, result.w_hat[t]);
        append_values(line, result.d[t]);
        append_values(line, result.p[t]);
        append_values(line, result.q[t]);
        append_values(line, result.v[t]);
        line += ',';
        line += format_double(result.cost[t]);
        line += ',';
        line += format_double(result.gain_norm[t]);
        out << line << '\n';
    }
}

void write_summary(const std::string& path, const SimulationResult& result) {
    std::ofstream out = open_out(path);
    out << "J_T = " << format_double(result.total_cost) << '\n';
    out << "diverged = " << (result.diverged ? "true" : "false") << '\n';
    out << "t_div = ";
    if (result.divergence_step) {
        out << *result.divergence_step;
    } else {
        out << "none";
    }
    out << '\n';
}

void write_sweep_csv(const std::string& path, const std::vector<BetaSweepRow>& rows) {
    std::ofstream out = open_out(path);
    out << "beta,avg_cost,diverged\n";
    for (const BetaSweepRow& row : rows) {
        out << (row.beta ? format_double(*row.beta) : "inf") << ',';
        out << (row.avg_cost ? format_double(*row.avg_cost) : "diverged") << ',';
        out << (row.diverged ? "true" : "false") << '\n';
    }
}

}  // namespace roco
