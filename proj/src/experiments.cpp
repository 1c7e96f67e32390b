#include "fsav/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "fsav/errors.hpp"

namespace fsav {

namespace {

using Kind = ConfigError::Kind;

[[noreturn]] void constraint(const std::string& what) {
    throw ConfigError(Kind::ConstraintViolation, what);
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    return out;
}

// Runs fn(i) for i in [0, count) across up to `threads` workers. Each task is
// independent; exceptions are rethrown on the caller thread.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(std::max(threads, 1), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                    fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

GridSpec grid_for(const ExperimentConfig& cfg, std::size_t n) {
    if (cfg.dim == 1) return build_grid_1d(cfg.x_left, cfg.x_right, n);
    return build_grid_2d(cfg.x_left, cfg.x_right, n);
}

SchemeConfig scheme_config(const ExperimentConfig& cfg, double tau) {
    SchemeConfig sc;
    sc.tau = tau;
    sc.denominator_guard = cfg.denominator_guard;
    return sc;
}

CnfConfig cnf_config(const ExperimentConfig& cfg, double tau) {
    CnfConfig cc;
    cc.tau = tau;
    cc.tolerance = cfg.cnf_tolerance;
    cc.max_iterations = cfg.cnf_max_iterations;
    return cc;
}

// Final fields of one run, FSAV or CNF per the config.
PairField final_fields(const ExperimentConfig& cfg, const Problem& problem, double tau) {
    FourierTransform ft(problem.grid);
    if (cfg.scheme == Scheme::Cnf) {
        auto result = run_cnf(problem.initial, problem.params, problem.grid, problem.symbol,
                              cnf_config(cfg, tau), cfg.t_final, ft);
        return std::move(result.z);
    }
    SavState state = make_initial_state(problem.initial.p, problem.initial.q,
                                        problem.params, problem.grid);
    auto result = run(std::move(state), problem.params, problem.grid, problem.symbol,
                      scheme_config(cfg, tau), cfg.t_final, ft);
    return PairField{std::move(result.state.p), std::move(result.state.q)};
}

void validate_step_count(double t_final, double tau) {
    try {
        step_count_for(t_final, tau);
    } catch (const NonIntegerStepCount& e) {
        constraint(std::string("t_final/tau: ") + e.what());
    }
}

std::string format_time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

void write_snapshot(const std::filesystem::path& out_dir, double t, const GridSpec& grid,
                    const RealField& p, const RealField& q, bool raw) {
    {
        auto out = open_csv(out_dir / ("snapshot_" + format_time_tag(t) + ".csv"));
        out << (grid.dim() == 2 ? "x,y,abs_u\n" : "x,abs_u\n");
        const std::size_t nx = grid.axis(0).n;
        const std::size_t ny = grid.dim() == 2 ? grid.axis(1).n : 1;
        for (std::size_t iy = 0; iy < ny; ++iy) {
            for (std::size_t ix = 0; ix < nx; ++ix) {
                const std::size_t j = grid.index(ix, iy);
                const double abs_u = std::hypot(p[j], q[j]);
                out << format_csv_double(grid.axis(0).point(ix));
                if (grid.dim() == 2) out << ',' << format_csv_double(grid.axis(1).point(iy));
                out << ',' << format_csv_double(abs_u) << '\n';
            }
        }
    }
    if (raw) {
        auto out = open_csv(out_dir / ("snapshot_raw_" + format_time_tag(t) + ".csv"));
        out << (grid.dim() == 2 ? "x,y,p,q\n" : "x,p,q\n");
        const std::size_t nx = grid.axis(0).n;
        const std::size_t ny = grid.dim() == 2 ? grid.axis(1).n : 1;
        for (std::size_t iy = 0; iy < ny; ++iy) {
            for (std::size_t ix = 0; ix < nx; ++ix) {
                const std::size_t j = grid.index(ix, iy);
                out << format_csv_double(grid.axis(0).point(ix));
                if (grid.dim() == 2) out << ',' << format_csv_double(grid.axis(1).point(iy));
                out << ',' << format_csv_double(p[j]) << ',' << format_csv_double(q[j]) << '\n';
            }
        }
    }
}

// Snapshot times must land on step boundaries.
std::set<std::int64_t> snapshot_steps(const ExperimentConfig& cfg, double tau) {
    std::set<std::int64_t> steps;
    for (double t : cfg.snapshot_times) {
        const double ratio = t / tau;
        const double rounded = std::round(ratio);
        if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio)))
            constraint("snapshot_times: " + format_time_tag(t) +
                       " does not align with the step grid");
        steps.insert(static_cast<std::int64_t>(rounded));
    }
    return steps;
}

void write_conservation_csv(const std::filesystem::path& path,
                            const ConservationRecord& record, const DriftSeries& drifts,
                            bool with_original) {
    auto out = open_csv(path);
    out << "step,t,H,M,RH,RM,w,E";
    if (with_original) out << ",H_orig";
    out << '\n';
    for (std::size_t i = 0; i < record.samples.size(); ++i) {
        const auto& s = record.samples[i];
        out << s.step << ',' << format_csv_double(s.t) << ',' << format_csv_double(s.energy)
            << ',' << format_csv_double(s.mass) << ',' << format_csv_double(drifts.rh[i])
            << ',' << format_csv_double(drifts.rm[i]) << ',' << format_csv_double(s.w) << ','
            << format_csv_double(s.e_nonlinear);
        if (with_original) out << ',' << format_csv_double(s.energy_original.value_or(0.0));
        out << '\n';
    }
}

void write_table_csv(const std::filesystem::path& path, const char* param_name,
                     const ConvergenceTable& table) {
    auto out = open_csv(path);
    out << param_name << ",error,order\n";
    for (const auto& row : table.rows) {
        out << format_csv_double(row.parameter) << ',' << format_csv_double(row.error) << ',';
        if (row.at_floor) out << "floor";
        else if (row.order) out << format_csv_double(*row.order);
        out << '\n';
    }
}

} // namespace

std::string format_csv_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

RealField sample_potential(PotentialKind kind, const GridSpec& grid) {
    const std::size_t total = grid.total_points();
    RealField v(total, 0.0);
    if (kind == PotentialKind::None) return v;

    const std::size_t nx = grid.axis(0).n;
    const std::size_t ny = grid.dim() == 2 ? grid.axis(1).n : 1;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double x = grid.axis(0).point(ix);
            const double y = grid.dim() == 2 ? grid.axis(1).point(iy) : 0.0;
            double value = 0.0;
            if (kind == PotentialKind::Harmonic) {
                value = 0.5 * (x * x + y * y);
            } else { // optical lattice
                const double sx = std::sin(std::numbers::pi * x);
                value = 10.0 * sx * sx;
                if (grid.dim() == 2) {
                    const double sy = std::sin(std::numbers::pi * y);
                    value += 10.0 * sy * sy;
                }
            }
            v[grid.index(ix, iy)] = value;
        }
    }
    return v;
}

PairField sample_initial_condition(InitialConditionKind kind, double amplitude,
                                   const GridSpec& grid) {
    const std::size_t total = grid.total_points();
    PairField z{RealField(total, 0.0), RealField(total, 0.0)};

    const std::size_t nx = grid.axis(0).n;
    const std::size_t ny = grid.dim() == 2 ? grid.axis(1).n : 1;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t j = grid.index(ix, iy);
            const double x = grid.axis(0).point(ix);
            const double y = grid.dim() == 2 ? grid.axis(1).point(iy) : 0.0;
            switch (kind) {
            case InitialConditionKind::GaussianChirp: {
                // u0 = exp(-x^2) exp(-i x)
                const double envelope = std::exp(-x * x);
                z.p[j] = envelope * std::cos(x);
                z.q[j] = -envelope * std::sin(x);
                break;
            }
            case InitialConditionKind::Gaussian2d:
                // u0 = (2/sqrt(pi)) exp(-x^2-y^2), purely real
                z.p[j] = 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x - y * y);
                break;
            case InitialConditionKind::Constant:
                z.p[j] = amplitude;
                break;
            }
        }
    }
    return z;
}

Problem make_problem(const ExperimentConfig& cfg, std::size_t n_override) {
    Problem problem;
    problem.grid = grid_for(cfg, n_override ? n_override : cfg.n);
    problem.symbol = build_symbol(problem.grid, cfg.alpha, cfg.gamma,
                                  cfg.alpha_range_override);
    problem.params.alpha = cfg.alpha;
    problem.params.gamma = cfg.gamma;
    problem.params.beta = cfg.beta;
    problem.params.c0 = cfg.c0;
    problem.params.potential = sample_potential(cfg.potential, problem.grid);
    problem.initial =
        sample_initial_condition(cfg.initial_condition, cfg.ic_amplitude, problem.grid);
    return problem;
}

RunCommandOutcome cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                          bool check) {
    if (!(cfg.tau > 0.0)) constraint("tau: required by the run command");
    validate_step_count(cfg.t_final, cfg.tau);
    std::filesystem::create_directories(out_dir);

    const Problem problem = make_problem(cfg);
    FourierTransform ft(problem.grid);
    const auto snaps = snapshot_steps(cfg, cfg.tau);

    ConservationMonitor monitor(problem.params, problem.grid, problem.symbol, ft,
                                cfg.log_original_energy);

    auto snapshot_hook = [&](const SavState& state) {
        if (snaps.count(state.step_index))
            write_snapshot(out_dir, state.t, problem.grid, state.p, state.q,
                           cfg.snapshot_raw);
    };

    if (cfg.scheme == Scheme::Fsav) {
        SavState state = make_initial_state(problem.initial.p, problem.initial.q,
                                            problem.params, problem.grid);
        RunObservers obs;
        obs.stride = cfg.observer_stride;
        obs.sample = [&](const SavState& s, const SolveReport*) { monitor.observe(s); };
        obs.every_step = snapshot_hook;
        run(std::move(state), problem.params, problem.grid, problem.symbol,
            scheme_config(cfg, cfg.tau), cfg.t_final, ft, obs);
    } else {
        // CNF path: same sampling contract, with w recomputed as sqrt(E+C0)
        // and H the energy this scheme conserves.
        const std::int64_t steps = step_count_for(cfg.t_final, cfg.tau);
        PairField z = problem.initial;
        SavState view; // adapter for the monitor/snapshot interfaces
        auto refresh_view = [&](std::int64_t m) {
            view.p = z.p;
            view.q = z.q;
            view.t = static_cast<double>(m) * cfg.tau;
            view.step_index = m;
        };
        auto observe_cnf = [&](std::int64_t m) {
            ConservationSample s;
            s.step = m;
            s.t = static_cast<double>(m) * cfg.tau;
            s.energy = cnf_energy(z, problem.params, problem.grid, problem.symbol, ft);
            s.mass = discrete_mass_fields(z.p, z.q, problem.grid);
            s.e_nonlinear = compute_E(z.p, z.q, problem.params, problem.grid);
            s.w = std::sqrt(std::max(0.0, s.e_nonlinear + problem.params.c0));
            monitor.push(s);
        };
        refresh_view(0);
        observe_cnf(0);
        snapshot_hook(view);
        for (std::int64_t m = 0; m < steps; ++m) {
            auto step = step_cnf(z, problem.params, problem.grid, problem.symbol,
                                 cnf_config(cfg, cfg.tau), ft);
            z = std::move(step.z);
            const std::int64_t done = m + 1;
            if (done % cfg.observer_stride == 0 || done == steps) observe_cnf(done);
            if (snaps.count(done)) {
                refresh_view(done);
                snapshot_hook(view);
            }
        }
    }

    const DriftSeries drifts = relative_drifts(monitor.record());
    RunCommandOutcome outcome;
    outcome.max_rh = drifts.max_rh;
    outcome.max_rm = drifts.max_rm;
    outcome.samples = monitor.record().samples.size();
    outcome.conservation_csv = out_dir / "conservation.csv";
    write_conservation_csv(outcome.conservation_csv, monitor.record(), drifts,
                           cfg.log_original_energy);

    if (check && outcome.max_rh > cfg.check_rh_max) {
        std::ostringstream os;
        os << "max RH " << outcome.max_rh << " exceeds " << cfg.check_rh_max;
        throw CheckFailed(os.str());
    }
    return outcome;
}

LadderOutcome cmd_converge_time(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir, bool check,
                                int threads) {
    if (cfg.tau_list.size() < 1) constraint("tau_list: required by converge-time");
    for (std::size_t i = 0; i + 1 < cfg.tau_list.size(); ++i) {
        if (std::abs(cfg.tau_list[i + 1] - 0.5 * cfg.tau_list[i]) > 1e-12 * cfg.tau_list[i])
            constraint("tau_list: entries must be successive halvings");
    }
    std::vector<double> taus = cfg.tau_list;
    taus.push_back(0.5 * taus.back()); // closes the final error pair
    for (double tau : taus) {
        if (!(tau > 0.0)) constraint("tau_list: entries must be positive");
        validate_step_count(cfg.t_final, tau);
    }
    std::filesystem::create_directories(out_dir);

    const Problem problem = make_problem(cfg);
    std::vector<PairField> finals(taus.size());
    parallel_for(taus.size(), threads,
                 [&](std::size_t i) { finals[i] = final_fields(cfg, problem, taus[i]); });

    std::vector<double> errors(cfg.tau_list.size());
    for (std::size_t i = 0; i < errors.size(); ++i)
        errors[i] = error_between_runs(finals[i].p, finals[i].q, problem.grid,
                                       finals[i + 1].p, finals[i + 1].q, problem.grid);

    LadderOutcome outcome;
    outcome.table = make_convergence_table(cfg.tau_list, errors);
    outcome.csv = out_dir / "orders_time.csv";
    write_table_csv(outcome.csv, "tau", outcome.table);

    if (check) {
        for (const auto& row : outcome.table.rows) {
            if (!row.order) continue;
            if (std::abs(*row.order - cfg.check_order_target) > cfg.check_order_tol) {
                std::ostringstream os;
                os << "temporal order " << *row.order << " at tau = " << row.parameter
                   << " outside " << cfg.check_order_target << " +/- " << cfg.check_order_tol;
                throw CheckFailed(os.str());
            }
        }
    }
    return outcome;
}

LadderOutcome cmd_converge_space(const ExperimentConfig& cfg,
                                 const std::filesystem::path& out_dir, bool check,
                                 int threads) {
    if (cfg.n_list.size() < 1) constraint("n_list: required by converge-space");
    for (std::size_t i = 0; i + 1 < cfg.n_list.size(); ++i)
        if (cfg.n_list[i + 1] != 2 * cfg.n_list[i])
            constraint("n_list: entries must be successive doublings");
    if (!(cfg.tau > 0.0)) constraint("tau: required by converge-space");
    validate_step_count(cfg.t_final, cfg.tau);
    std::filesystem::create_directories(out_dir);

    std::vector<std::size_t> ns(cfg.n_list);
    ns.push_back(2 * ns.back());

    std::vector<Problem> problems(ns.size());
    std::vector<PairField> finals(ns.size());
    parallel_for(ns.size(), threads, [&](std::size_t i) {
        problems[i] = make_problem(cfg, ns[i]);
        finals[i] = final_fields(cfg, problems[i], cfg.tau);
    });

    std::vector<double> errors(cfg.n_list.size());
    for (std::size_t i = 0; i < errors.size(); ++i)
        errors[i] = error_between_runs(finals[i].p, finals[i].q, problems[i].grid,
                                       finals[i + 1].p, finals[i + 1].q, problems[i + 1].grid);

    std::vector<double> params(cfg.n_list.size());
    for (std::size_t i = 0; i < params.size(); ++i)
        params[i] = static_cast<double>(cfg.n_list[i]);

    LadderOutcome outcome;
    outcome.table = make_convergence_table(params, errors);
    outcome.csv = out_dir / "orders_space.csv";
    write_table_csv(outcome.csv, "N", outcome.table);

    if (check) {
        for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
            if (errors[i + 1] <= 1e-13) continue; // fine side at roundoff floor
            if (errors[i] / errors[i + 1] < cfg.check_space_drop) {
                std::ostringstream os;
                os << "spatial error drop " << errors[i] / errors[i + 1] << " from N = "
                   << cfg.n_list[i] << " below factor " << cfg.check_space_drop;
                throw CheckFailed(os.str());
            }
        }
    }
    return outcome;
}

CostOutcome cmd_compare_cost(const ExperimentConfig& cfg,
                             const std::filesystem::path& out_dir, bool check) {
    std::vector<double> taus = cfg.tau_list;
    if (taus.empty()) {
        if (!(cfg.tau > 0.0)) constraint("tau_list or tau: required by compare-cost");
        taus.push_back(cfg.tau);
    }
    for (double tau : taus) validate_step_count(cfg.t_final, tau);
    std::filesystem::create_directories(out_dir);

    const Problem problem = make_problem(cfg);
    CostOutcome outcome;

    for (double tau : taus) {
        FourierTransform ft(problem.grid);
        {
            SavState state = make_initial_state(problem.initial.p, problem.initial.q,
                                                problem.params, problem.grid);
            auto result = run(std::move(state), problem.params, problem.grid, problem.symbol,
                              scheme_config(cfg, tau), cfg.t_final, ft);
            outcome.records.push_back(result.timing);
        }
        {
            // Manual CNF loop so a NoConvergence failure still yields a row
            // with the steps completed.
            const std::int64_t steps = step_count_for(cfg.t_final, tau);
            const CnfConfig cc = cnf_config(cfg, tau);
            PairField z = problem.initial;
            TimingRecord rec;
            rec.scheme = "cnf";
            rec.tau = tau;
            rec.grid_points = problem.grid.total_points();
            double wall = 0.0;
            std::int64_t done = 0;
            try {
                for (; done < steps; ++done) {
                    const auto t0 = std::chrono::steady_clock::now();
                    auto step = step_cnf(z, problem.params, problem.grid, problem.symbol,
                                         cc, ft);
                    wall += std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                          t0)
                                .count();
                    rec.inner_iterations += static_cast<std::size_t>(step.iterations);
                    z = std::move(step.z);
                }
            } catch (const NoConvergence& e) {
                std::cerr << "compare-cost: cnf tau=" << tau << " stopped at step " << done
                          << ": " << e.what() << "\n";
            }
            rec.steps = static_cast<std::size_t>(done);
            rec.wall_seconds = wall;
            rec.mean_step_seconds = done > 0 ? wall / static_cast<double>(done) : 0.0;
            outcome.records.push_back(rec);
        }
    }

    outcome.csv = out_dir / "cost.csv";
    {
        auto out = open_csv(outcome.csv);
        out << "scheme,tau,wall_s,steps,inner_iters\n";
        for (const auto& r : outcome.records) {
            out << r.scheme << ',' << format_csv_double(r.tau) << ','
                << format_csv_double(r.wall_seconds) << ',' << r.steps << ','
                << r.inner_iterations << '\n';
        }
    }

    if (check) {
        for (std::size_t i = 0; i + 1 < outcome.records.size(); i += 2) {
            const auto& fsav_rec = outcome.records[i];
            const auto& cnf_rec = outcome.records[i + 1];
            if (cnf_rec.steps == fsav_rec.steps &&
                !(fsav_rec.wall_seconds < cnf_rec.wall_seconds)) {
                std::ostringstream os;
                os << "fsav (" << fsav_rec.wall_seconds << " s) not faster than cnf ("
                   << cnf_rec.wall_seconds << " s) at tau = " << fsav_rec.tau;
                throw CheckFailed(os.str());
            }
        }
    }
    return outcome;
}

} // namespace fsav
