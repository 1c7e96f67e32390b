// fsav-nls: batch driver for the spectral SAV solver.
//
// Subcommands: run | converge-time | converge-space | compare-cost, each fed
// by a flat key=value config file. Exit codes: 0 success, 2 config error,
// 3 solver/runtime error, 4 --check threshold failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fsav/errors.hpp"
#include "fsav/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fsav::ConfigError(fsav::ConfigError::Kind::ConstraintViolation,
                                     "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    bool check = false;
    int threads = 1;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
    sub->add_option("--config", opts.config_path, "path to a key=value config file")
        ->required();
    sub->add_flag("--check", opts.check, "fail (exit 4) when thresholds are violated");
    sub->add_option("--out", opts.out_dir, "output directory (default: config output_dir)");
    sub->add_option("--threads", opts.threads, "workers for independent ladder runs")
        ->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-preserving spectral SAV solver for the space-fractional "
                 "nonlinear Schrodinger equation"};
    app.require_subcommand(1);

    CommonOptions opts;
    auto* cmd_run = app.add_subcommand("run", "single simulation with conservation logging");
    auto* cmd_time = app.add_subcommand("converge-time", "temporal refinement study");
    auto* cmd_space = app.add_subcommand("converge-space", "spatial refinement study");
    auto* cmd_cost = app.add_subcommand("compare-cost", "FSAV vs CNF wall-clock comparison");
    for (auto* sub : {cmd_run, cmd_time, cmd_space, cmd_cost}) add_common(sub, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        const fsav::ExperimentConfig cfg = fsav::parse_config(read_file(opts.config_path));
        const std::filesystem::path out =
            opts.out_dir.empty() ? std::filesystem::path(cfg.output_dir)
                                 : std::filesystem::path(opts.out_dir);

        if (cmd_run->parsed()) {
            const auto outcome = fsav::cmd_run(cfg, out, opts.check);
            std::cout << "wrote " << outcome.conservation_csv.string() << " ("
                      << outcome.samples << " samples, max RH = " << outcome.max_rh
                      << ", max RM = " << outcome.max_rm << ")\n";
        } else if (cmd_time->parsed()) {
            const auto outcome = fsav::cmd_converge_time(cfg, out, opts.check, opts.threads);
            std::cout << "wrote " << outcome.csv.string() << "\n";
            for (const auto& row : outcome.table.rows) {
                std::cout << "  tau = " << row.parameter << "  error = " << row.error;
                if (row.at_floor) std::cout << "  (floor)";
                else if (row.order) std::cout << "  order = " << *row.order;
                std::cout << "\n";
            }
        } else if (cmd_space->parsed()) {
            const auto outcome = fsav::cmd_converge_space(cfg, out, opts.check, opts.threads);
            std::cout << "wrote " << outcome.csv.string() << "\n";
            for (const auto& row : outcome.table.rows) {
                std::cout << "  N = " << row.parameter << "  error = " << row.error;
                if (row.at_floor) std::cout << "  (floor)";
                else if (row.order) std::cout << "  order = " << *row.order;
                std::cout << "\n";
            }
        } else if (cmd_cost->parsed()) {
            const auto outcome = fsav::cmd_compare_cost(cfg, out, opts.check);
            std::cout << "wrote " << outcome.csv.string() << "\n";
            for (const auto& r : outcome.records) {
                std::cout << "  " << r.scheme << "  tau = " << r.tau << "  wall = "
                          << r.wall_seconds << " s  steps = " << r.steps
                          << "  inner = " << r.inner_iterations << "\n";
            }
        }
    } catch (const fsav::CheckFailed& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 4;
    } catch (const fsav::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
