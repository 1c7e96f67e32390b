#include "fsav/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "fsav/errors.hpp"

namespace fsav {

namespace {

using Kind = ConfigError::Kind;

[[noreturn]] void fail(Kind kind, const std::string& msg) {
    throw ConfigError(kind, msg);
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct RawEntry {
    std::string value;
    int line = 0;
};

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "preset", "dim", "x_left", "x_right", "n", "alpha", "gamma", "beta",
        "potential", "initial_condition", "ic_amplitude", "c0", "tau", "t_final",
        "scheme", "observer_stride", "output_dir", "seed", "tau_list", "n_list",
        "snapshot_times", "snapshot_raw", "log_original_energy",
        "alpha_range_override", "denominator_guard", "cnf_tolerance",
        "cnf_max_iterations", "check_rh_max", "check_order_target",
        "check_order_tol", "check_space_drop"};
    return keys;
}

double parse_double(const std::string& key, const RawEntry& e) {
    const std::string v = trim(e.value);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) {
        std::ostringstream os;
        os << "line " << e.line << ": key '" << key << "' expects a number, got '"
           << v << "'";
        fail(Kind::TypeError, os.str());
    }
    return x;
}

std::int64_t parse_int(const std::string& key, const RawEntry& e) {
    const double x = parse_double(key, e);
    const double rounded = std::round(x);
    if (x != rounded) {
        std::ostringstream os;
        os << "line " << e.line << ": key '" << key << "' expects an integer, got '"
           << trim(e.value) << "'";
        fail(Kind::TypeError, os.str());
    }
    return static_cast<std::int64_t>(rounded);
}

bool parse_bool(const std::string& key, const RawEntry& e) {
    const std::string v = trim(e.value);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    std::ostringstream os;
    os << "line " << e.line << ": key '" << key << "' expects true/false, got '" << v << "'";
    fail(Kind::TypeError, os.str());
}

std::vector<double> parse_double_list(const std::string& key, const RawEntry& e) {
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        RawEntry sub{item, e.line};
        out.push_back(parse_double(key, sub));
    }
    if (out.empty()) {
        std::ostringstream os;
        os << "line " << e.line << ": key '" << key << "' expects a comma-separated list";
        fail(Kind::TypeError, os.str());
    }
    return out;
}

// Preset catalog. Values are frozen; alpha is intentionally absent everywhere
// (each experiment sweeps or pins it explicitly).
void apply_preset(const std::string& name, int line, ExperimentConfig& cfg) {
    auto common_1d = [&cfg] {
        cfg.dim = 1;
        cfg.gamma = 1.0;
        cfg.beta = 2.0;
        cfg.potential = PotentialKind::None;
        cfg.initial_condition = InitialConditionKind::GaussianChirp;
        cfg.c0 = 0.0;
    };
    auto common_2d = [&cfg] {
        cfg.dim = 2;
        cfg.gamma = 1.0;
        cfg.beta = 1.0;
        cfg.potential = PotentialKind::None;
        cfg.initial_condition = InitialConditionKind::Gaussian2d;
        cfg.c0 = 0.0;
    };

    if (name == "ex4_1") {
        common_1d();
        cfg.x_left = -16.0;
        cfg.x_right = 16.0;
        cfg.n = 256;
        cfg.t_final = 1.0;
    } else if (name == "ex4_1_conserve") {
        common_1d();
        cfg.x_left = -40.0;
        cfg.x_right = 40.0;
        cfg.n = 160; // h = 0.5
        cfg.tau = 0.01;
        cfg.t_final = 10.0;
    } else if (name == "ex4_2") {
        common_2d();
        cfg.x_left = -8.0;
        cfg.x_right = 8.0;
        cfg.n = 128;
        cfg.t_final = 1.0;
    } else if (name == "ex4_2_conserve") {
        common_2d();
        cfg.x_left = -10.0;
        cfg.x_right = 10.0;
        cfg.n = 40; // h = 0.5
        cfg.tau = 0.02;
        cfg.t_final = 2.0;
    } else if (name == "ex4_3_v1" || name == "ex4_3_v2") {
        common_2d();
        cfg.x_left = -5.0;
        cfg.x_right = 5.0;
        cfg.n = 64;
        cfg.tau = 0.01;
        cfg.t_final = 2.0;
        cfg.potential = (name == "ex4_3_v1") ? PotentialKind::Harmonic
                                             : PotentialKind::OpticalLattice;
    } else {
        std::ostringstream os;
        os << "line " << line << ": unknown preset '" << name << "'";
        fail(Kind::ConstraintViolation, os.str());
    }
    cfg.preset = name;
}

[[noreturn]] void constraint(const std::string& key, const std::string& what) {
    std::ostringstream os;
    os << "key '" << key << "': " << what;
    fail(Kind::ConstraintViolation, os.str());
}

} // namespace

std::vector<std::string> preset_names() {
    return {"ex4_1", "ex4_1_conserve", "ex4_2", "ex4_2_conserve", "ex4_3_v1", "ex4_3_v2"};
}

bool is_preset(const std::string& name) {
    const auto names = preset_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

ExperimentConfig parse_config(const std::string& text) {
    // Pass 1: split into key/value entries, catching unknown keys early.
    std::map<std::string, RawEntry> entries;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "line " << line_no << ": expected key=value, got '" << line << "'";
            fail(Kind::TypeError, os.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& keys = known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            std::ostringstream os;
            os << "line " << line_no << ": unknown key '" << key << "'";
            fail(Kind::UnknownKey, os.str());
        }
        entries[key] = RawEntry{value, line_no};
    }

    // Pass 2: preset expansion, then explicit overrides.
    ExperimentConfig cfg;
    if (auto it = entries.find("preset"); it != entries.end())
        apply_preset(trim(it->second.value), it->second.line, cfg);

    for (const auto& [key, entry] : entries) {
        if (key == "preset") continue;
        if (key == "dim") cfg.dim = static_cast<int>(parse_int(key, entry));
        else if (key == "x_left") cfg.x_left = parse_double(key, entry);
        else if (key == "x_right") cfg.x_right = parse_double(key, entry);
        else if (key == "n") cfg.n = static_cast<std::size_t>(parse_int(key, entry));
        else if (key == "alpha") cfg.alpha = parse_double(key, entry);
        else if (key == "gamma") cfg.gamma = parse_double(key, entry);
        else if (key == "beta") cfg.beta = parse_double(key, entry);
        else if (key == "potential") {
            const std::string v = trim(entry.value);
            if (v == "none") cfg.potential = PotentialKind::None;
            else if (v == "harmonic") cfg.potential = PotentialKind::Harmonic;
            else if (v == "optical_lattice") cfg.potential = PotentialKind::OpticalLattice;
            else constraint(key, "must be none|harmonic|optical_lattice, got '" + v + "'");
        } else if (key == "initial_condition") {
            const std::string v = trim(entry.value);
            if (v == "gaussian_chirp") cfg.initial_condition = InitialConditionKind::GaussianChirp;
            else if (v == "gaussian_2d") cfg.initial_condition = InitialConditionKind::Gaussian2d;
            else if (v == "constant") cfg.initial_condition = InitialConditionKind::Constant;
            else constraint(key, "must be gaussian_chirp|gaussian_2d|constant, got '" + v + "'");
        } else if (key == "ic_amplitude") cfg.ic_amplitude = parse_double(key, entry);
        else if (key == "c0") cfg.c0 = parse_double(key, entry);
        else if (key == "tau") cfg.tau = parse_double(key, entry);
        else if (key == "t_final") cfg.t_final = parse_double(key, entry);
        else if (key == "scheme") {
            const std::string v = trim(entry.value);
            if (v == "fsav") cfg.scheme = Scheme::Fsav;
            else if (v == "cnf") cfg.scheme = Scheme::Cnf;
            else constraint(key, "must be fsav|cnf, got '" + v + "'");
        } else if (key == "observer_stride") cfg.observer_stride = parse_int(key, entry);
        else if (key == "output_dir") cfg.output_dir = trim(entry.value);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, entry));
        else if (key == "tau_list") cfg.tau_list = parse_double_list(key, entry);
        else if (key == "n_list") {
            cfg.n_list.clear();
            for (double x : parse_double_list(key, entry)) {
                if (x <= 0 || x != std::round(x))
                    constraint(key, "entries must be positive integers");
                cfg.n_list.push_back(static_cast<std::size_t>(x));
            }
        } else if (key == "snapshot_times") cfg.snapshot_times = parse_double_list(key, entry);
        else if (key == "snapshot_raw") cfg.snapshot_raw = parse_bool(key, entry);
        else if (key == "log_original_energy") cfg.log_original_energy = parse_bool(key, entry);
        else if (key == "alpha_range_override") cfg.alpha_range_override = parse_bool(key, entry);
        else if (key == "denominator_guard") cfg.denominator_guard = parse_double(key, entry);
        else if (key == "cnf_tolerance") cfg.cnf_tolerance = parse_double(key, entry);
        else if (key == "cnf_max_iterations")
            cfg.cnf_max_iterations = static_cast<int>(parse_int(key, entry));
        else if (key == "check_rh_max") cfg.check_rh_max = parse_double(key, entry);
        else if (key == "check_order_target") cfg.check_order_target = parse_double(key, entry);
        else if (key == "check_order_tol") cfg.check_order_tol = parse_double(key, entry);
        else if (key == "check_space_drop") cfg.check_space_drop = parse_double(key, entry);
    }

    // Pass 3: validate against the module preconditions.
    if (cfg.dim != 1 && cfg.dim != 2) constraint("dim", "must be 1 or 2");
    if (!(cfg.x_right > cfg.x_left)) constraint("x_right", "domain must satisfy x_right > x_left");
    if (cfg.n < 4 || cfg.n % 2 != 0) constraint("n", "must be an even integer >= 4");
    const double alpha_min = cfg.alpha_range_override ? 0.0 : 1.0;
    if (!(cfg.alpha > alpha_min && cfg.alpha <= 2.0)) {
        std::ostringstream os;
        os << "alpha = " << cfg.alpha << " required in (" << alpha_min << ",2]"
           << (cfg.alpha == 0.0 ? " (missing; presets never pin alpha)" : "");
        constraint("alpha", os.str());
    }
    if (!(cfg.gamma > 0.0)) constraint("gamma", "must be positive");
    if (cfg.c0 < 0.0) constraint("c0", "must be nonnegative");
    if (cfg.tau < 0.0) constraint("tau", "must be positive when set");
    if (!(cfg.t_final > 0.0)) constraint("t_final", "must be positive");
    if (cfg.observer_stride < 1) constraint("observer_stride", "must be >= 1");
    if (!(cfg.cnf_tolerance > 0.0)) constraint("cnf_tolerance", "must be positive");
    if (cfg.cnf_max_iterations < 1) constraint("cnf_max_iterations", "must be >= 1");
    if (cfg.initial_condition == InitialConditionKind::GaussianChirp && cfg.dim != 1)
        constraint("initial_condition", "gaussian_chirp is one-dimensional");
    if (cfg.initial_condition == InitialConditionKind::Gaussian2d && cfg.dim != 2)
        constraint("initial_condition", "gaussian_2d is two-dimensional");
    return cfg;
}

} // namespace fsav
