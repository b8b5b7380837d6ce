#include "roco/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace roco {

namespace {

// Known keys per section; anything else is rejected.
const std::map<std::string, std::set<std::string>> kSchema = {
    {"", {"K", "H", "eta", "Q", "R", "T", "beta", "betas", "divergence_threshold", "M0", "delta",
          "beta_cap"}},
    {"plant", {"A", "B", "num", "den"}},
    {"uncertainty", {"f_num", "f_den", "num", "den", "A", "B", "C", "D"}},
    {"disturbance", {"kind", "amplitude", "switch_time", "values_file"}},
};

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

}  // namespace

double parse_number(const std::string& text) {
    const std::string t = trim(text);
    double value = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || t.empty()) {
        fail("invalid number '" + text + "'");
    }
    return value;
}

Eigen::MatrixXd parse_matrix(const std::string& text) {
    std::string t = trim(text);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
        fail("matrix must be bracketed: '" + text + "'");
    }
    t = t.substr(1, t.size() - 2);

    std::vector<std::vector<double>> rows;
    std::stringstream row_stream(t);
    std::string row_text;
    while (std::getline(row_stream, row_text, ';')) {
        std::vector<double> row;
        std::stringstream entry_stream(row_text);
        std::string entry;
        while (entry_stream >> entry) {
            row.push_back(parse_number(entry));
        }
        if (!row.empty()) {
            rows.push_back(std::move(row));
        }
    }
    if (rows.empty()) {
        fail("empty matrix: '" + text + "'");
    }
    const size_t cols = rows.front().size();
    for (const auto& row : rows) {
        if (row.size() != cols) {
            fail("ragged matrix rows: '" + text + "'");
        }
    }
    Eigen::MatrixXd m(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!trim(item).empty()) {
            values.push_back(parse_number(item));
        }
    }
    if (values.empty()) {
        fail("empty number list '" + text + "'");
    }
    return values;
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile config;
    std::stringstream stream(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            if (kSchema.find(section) == kSchema.end()) {
                fail("unknown section '" + section + "' (line " + std::to_string(line_no) + ")");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail("expected 'key = value' (line " + std::to_string(line_no) + ")");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto schema_it = kSchema.find(section);
        if (schema_it == kSchema.end() || schema_it->second.find(key) == schema_it->second.end()) {
            fail("unknown key '" + key + "' in section '" + section + "' (line " +
                 std::to_string(line_no) + ")");
        }
        if (!config.values_[section].emplace(key, value).second) {
            fail("duplicate key '" + key + "' (line " + std::to_string(line_no) + ")");
        }
    }
    return config;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail("cannot open file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto sec = values_.find(section);
    return sec != values_.end() && sec->second.find(key) != sec->second.end();
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
    const auto sec = values_.find(section);
    if (sec != values_.end()) {
        const auto it = sec->second.find(key);
        if (it != sec->second.end()) {
            return it->second;
        }
    }
    fail("missing required key '" + key + "'" +
         (section.empty() ? "" : " in section [" + section + "]"));
}

double ConfigFile::get_number(const std::string& section, const std::string& key) const {
    return parse_number(get_string(section, key));
}

int ConfigFile::get_int(const std::string& section, const std::string& key) const {
    const double v = get_number(section, key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        fail("key '" + key + "' must be an integer");
    }
    return i;
}

Eigen::MatrixXd ConfigFile::get_matrix(const std::string& section, const std::string& key) const {
    return parse_matrix(get_string(section, key));
}

StateSpace plant_from_config(const ConfigFile& config) {
    if (config.has("plant", "A") || config.has("plant", "B")) {
        const Eigen::MatrixXd A = config.get_matrix("plant", "A");
        const Eigen::MatrixXd B = config.get_matrix("plant", "B");
        return StateSpace(A, B, Eigen::MatrixXd::Identity(A.rows(), A.rows()),
                          Eigen::MatrixXd::Zero(A.rows(), B.cols()));
    }
    if (config.has("plant", "num")) {
        const Eigen::MatrixXd num = config.get_matrix("plant", "num");
        const Eigen::MatrixXd den = config.get_matrix("plant", "den");
        TransferFunctionSiso tf;
        tf.num.assign(num.data(), num.data() + num.size());
        tf.den.assign(den.data(), den.data() + den.size());
        return tf_to_ss(tf);
    }
    fail("missing [plant] section with A/B or num/den");
}

std::optional<StateSpace> uncertainty_from_config(const ConfigFile& config) {
    if (config.has("uncertainty", "f_num")) {
        const Eigen::MatrixXd num = config.get_matrix("uncertainty", "f_num");
        const Eigen::MatrixXd den = config.get_matrix("uncertainty", "f_den");
        TransferFunctionSiso tf;
        tf.num.assign(num.data(), num.data() + num.size());
        tf.den.assign(den.data(), den.data() + den.size());
        return subtract_gain(tf_to_ss(tf), 1.0);
    }
    if (config.has("uncertainty", "num")) {
        const Eigen::MatrixXd num = config.get_matrix("uncertainty", "num");
        const Eigen::MatrixXd den = config.get_matrix("uncertainty", "den");
        TransferFunctionSiso tf;
        tf.num.assign(num.data(), num.data() + num.size());
        tf.den.assign(den.data(), den.data() + den.size());
        return tf_to_ss(tf);
    }
    if (config.has("uncertainty", "A") || config.has("uncertainty", "D")) {
        auto matrix_or = [&](const std::string& key, Eigen::Index rows,
                             Eigen::Index cols) -> Eigen::MatrixXd {
            return config.has("uncertainty", key) ? config.get_matrix("uncertainty", key)
                                                  : Eigen::MatrixXd::Zero(rows, cols);
        };
        const Eigen::MatrixXd D = config.get_matrix("uncertainty", "D");
        const Eigen::MatrixXd A = matrix_or("A", 0, 0);
        return StateSpace(A, matrix_or("B", A.rows(), D.cols()), matrix_or("C", D.rows(), A.rows()),
                          D);
    }
    return std::nullopt;
}

namespace {

DisturbanceSpec disturbance_from_config(const ConfigFile& config) {
    DisturbanceSpec spec;
    const std::string kind = config.get_string("disturbance", "kind");
    if (kind == "square") {
        spec.kind = DisturbanceSpec::Kind::square;
        spec.amplitude = config.get_number("disturbance", "amplitude");
        spec.switch_time = config.get_int("disturbance", "switch_time");
    } else if (kind == "constant") {
        spec.kind = DisturbanceSpec::Kind::constant;
        spec.amplitude = config.get_number("disturbance", "amplitude");
    } else if (kind == "file") {
        spec.kind = DisturbanceSpec::Kind::explicit_values;
        const std::string path = config.get_string("disturbance", "values_file");
        std::ifstream in(path);
        if (!in) {
            fail("cannot open disturbance values file '" + path + "'");
        }
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            std::vector<double> entries;
            std::stringstream row(line);
            std::string token;
            while (row >> token) {
                entries.push_back(parse_number(token));
            }
            Eigen::VectorXd v(static_cast<Eigen::Index>(entries.size()));
            for (size_t i = 0; i < entries.size(); ++i) {
                v(static_cast<Eigen::Index>(i)) = entries[i];
            }
            spec.values.push_back(std::move(v));
        }
    } else {
        fail("unknown disturbance kind '" + kind + "'");
    }
    return spec;
}

}  // namespace

ExperimentConfig experiment_from_config(const ConfigFile& config) {
    ExperimentConfig experiment;
    experiment.plant = plant_from_config(config);
    experiment.uncertainty = uncertainty_from_config(config);
    experiment.K = config.get_matrix("", "K");
    experiment.horizon = config.get_int("", "H");
    experiment.eta = config.get_number("", "eta");
    experiment.weights = CostWeights(config.get_matrix("", "Q"), config.get_matrix("", "R"));
    experiment.steps = config.get_int("", "T");
    experiment.disturbance = disturbance_from_config(config);
    if (config.has("", "beta")) {
        experiment.beta = config.get_number("", "beta");
    }
    if (config.has("", "divergence_threshold")) {
        experiment.divergence_threshold = config.get_number("", "divergence_threshold");
    }
    if (config.has("", "M0")) {
        experiment.initial_gains = config.get_matrix("", "M0");
    }
    validate_config(experiment);
    return experiment;
}

StabilityInputs stability_inputs_from_config(const ConfigFile& config) {
    StabilityInputs inputs;
    inputs.plant = plant_from_config(config);
    inputs.K = config.get_matrix("", "K");
    inputs.uncertainty = uncertainty_from_config(config);
    if (config.has("", "delta")) {
        inputs.delta = config.get_number("", "delta");
    }
    if (config.has("", "beta_cap")) {
        inputs.beta_cap = config.get_number("", "beta_cap");
    }
    if (!inputs.delta && !inputs.uncertainty) {
        fail("stability bound needs a 'delta' key or an [uncertainty] section");
    }
    return inputs;
}

std::optional<std::vector<double>> betas_from_config(const ConfigFile& config) {
    if (!config.has("", "betas")) {
        return std::nullopt;
    }
    return parse_number_list(config.get_string("", "betas"));
}

}  // namespace roco
