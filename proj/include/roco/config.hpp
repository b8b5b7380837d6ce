#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roco/simulation.hpp"

namespace roco {

/// Line-oriented `key = value` configuration text with INI-style
/// [section] headers.  Matrices are bracketed rows separated by
/// semicolons, e.g. `Q = [1 0; 0 1]`.  `#` starts a comment.  Unknown
/// sections or keys are rejected at parse time; numeric parsing is
/// locale-independent.
class ConfigFile {
  public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    double get_number(const std::string& section, const std::string& key) const;
    int get_int(const std::string& section, const std::string& key) const;
    Eigen::MatrixXd get_matrix(const std::string& section, const std::string& key) const;

  private:
    // section -> key -> raw value text
    std::map<std::string, std::map<std::string, std::string>> values_;
};

/// Locale-independent scalar parse; throws std::invalid_argument on junk.
double parse_number(const std::string& text);

/// Parses `[r00 r01; r10 r11]` matrix text.
Eigen::MatrixXd parse_matrix(const std::string& text);

/// Nominal plant from [plant]: either explicit A/B matrices (C = I, D = 0)
/// or a num/den transfer function realized canonically.
StateSpace plant_from_config(const ConfigFile& config);

/// Uncertainty block from [uncertainty] when present: f_num/f_den give the
/// unmodeled dynamics F with the block taken as F - I, num/den give the
/// block directly, and A/B/C/D give an explicit realization.
std::optional<StateSpace> uncertainty_from_config(const ConfigFile& config);

/// Full closed-loop experiment; requires K, H, eta, Q, R, T and a
/// [disturbance] section.
ExperimentConfig experiment_from_config(const ConfigFile& config);

/// Inputs of the stability-bound computation.
struct StabilityInputs {
    StateSpace plant;
    Eigen::MatrixXd K;
    std::optional<StateSpace> uncertainty;
    std::optional<double> delta;  // explicit bound; otherwise use ||uncertainty||
    double beta_cap = 1e4;
};

StabilityInputs stability_inputs_from_config(const ConfigFile& config);

/// Optional top-level `betas` list for sweeps.
std::optional<std::vector<double>> betas_from_config(const ConfigFile& config);

/// Parses a comma-separated list of numbers (CLI flag or config value).
std::vector<double> parse_number_list(const std::string& text);

}  // namespace roco
