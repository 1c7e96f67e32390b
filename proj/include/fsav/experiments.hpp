#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fsav/cnf.hpp"
#include "fsav/config.hpp"
#include "fsav/diagnostics.hpp"
#include "fsav/fsav_stepper.hpp"

// Experiment drivers behind the CLI: preset expansion to concrete problems,
// ladder runs, and CSV serialization. All values are written with 17
// significant digits so files round-trip to within 1 ulp.

namespace fsav {

/// Grid, symbol, parameters, and sampled initial condition for one run.
struct Problem {
    GridSpec grid;
    SpectralSymbol symbol;
    ModelParams params;
    PairField initial;
};

RealField sample_potential(PotentialKind kind, const GridSpec& grid);
PairField sample_initial_condition(InitialConditionKind kind, double amplitude,
                                   const GridSpec& grid);

/// Builds the problem from a config; n_override (per axis) replaces cfg.n
/// when nonzero (used by the spatial ladder).
Problem make_problem(const ExperimentConfig& cfg, std::size_t n_override = 0);

std::string format_csv_double(double x);

struct RunCommandOutcome {
    double max_rh = 0.0;
    double max_rm = 0.0;
    std::size_t samples = 0;
    std::filesystem::path conservation_csv;
};

/// Runs one simulation, writing conservation.csv (and any requested
/// snapshots) into out_dir. With check = true, throws CheckFailed when
/// max RH exceeds cfg.check_rh_max.
RunCommandOutcome cmd_run(const ExperimentConfig& cfg,
                          const std::filesystem::path& out_dir, bool check);

struct LadderOutcome {
    ConvergenceTable table;
    std::filesystem::path csv;
};

/// Temporal refinement study over cfg.tau_list (successive halvings); one
/// extra run at tau_min/2 closes the last error pair. Writes orders_time.csv.
LadderOutcome cmd_converge_time(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir, bool check,
                                int threads = 1);

/// Spatial refinement study over cfg.n_list (successive doublings) at fixed
/// cfg.tau; one extra run at 2*N_max closes the last pair. Writes
/// orders_space.csv.
LadderOutcome cmd_converge_space(const ExperimentConfig& cfg,
                                 const std::filesystem::path& out_dir, bool check,
                                 int threads = 1);

struct CostOutcome {
    std::vector<TimingRecord> records; // fsav/cnf interleaved per tau
    std::filesystem::path csv;
};

/// Times both schemes on identical setups for every tau in cfg.tau_list
/// (falling back to {cfg.tau}). Writes cost.csv. A CNF run that fails to
/// converge is reported with the steps it completed and the sweep continues.
CostOutcome cmd_compare_cost(const ExperimentConfig& cfg,
                             const std::filesystem::path& out_dir, bool check);

} // namespace fsav
