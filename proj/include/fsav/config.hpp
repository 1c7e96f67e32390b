#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fsav {

enum class Scheme { Fsav, Cnf };
enum class PotentialKind { None, Harmonic, OpticalLattice };
enum class InitialConditionKind { GaussianChirp, Gaussian2d, Constant };

/// One fully validated experiment description. Parsed from a flat
/// key=value text file (one pair per line, '#' comments); preset fields are
/// expanded first and then overridden by explicit keys.
struct ExperimentConfig {
    std::optional<std::string> preset;

    int dim = 1;
    double x_left = 0.0;
    double x_right = 0.0;
    std::size_t n = 0;

    double alpha = 0.0; // always explicit; presets never pin it
    double gamma = 1.0;
    double beta = 0.0;
    PotentialKind potential = PotentialKind::None;
    InitialConditionKind initial_condition = InitialConditionKind::Constant;
    double ic_amplitude = 1.0; // constant initial condition only

    double c0 = 0.0;
    double tau = 0.0; // 0 = unset; ladder commands may rely on tau_list instead
    double t_final = 0.0;
    Scheme scheme = Scheme::Fsav;

    std::int64_t observer_stride = 1;
    std::string output_dir = ".";
    std::uint64_t seed = 0; // consumed by randomized property tests only

    std::vector<double> tau_list;       // converge-time / compare-cost ladders
    std::vector<std::size_t> n_list;    // converge-space ladder
    std::vector<double> snapshot_times; // |u| snapshots during `run`
    bool snapshot_raw = false;          // also dump raw P,Q at snapshot times
    bool log_original_energy = false;
    bool alpha_range_override = false; // widen accepted alpha to (0,2]

    double denominator_guard = 1e-12;
    double cnf_tolerance = 1e-12;
    int cnf_max_iterations = 100;

    // --check thresholds
    double check_rh_max = 1e-9;
    double check_order_target = 2.0;
    double check_order_tol = 0.1;
    double check_space_drop = 100.0; // minimum error drop factor per doubling
};

/// Parses and validates the key=value text. Throws ConfigError with the
/// offending key/line named in the message.
ExperimentConfig parse_config(const std::string& text);

/// Names of the built-in presets, in catalog order.
std::vector<std::string> preset_names();

/// True when `name` is a known preset.
bool is_preset(const std::string& name);

} // namespace fsav
