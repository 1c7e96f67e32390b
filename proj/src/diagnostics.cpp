#include "fsav/diagnostics.hpp"

#include <cmath>
#include <sstream>

#include "fsav/errors.hpp"

namespace fsav {

double modified_energy(const SavState& state, const SpectralSymbol& symbol,
                       const GridSpec& grid, FourierTransform& ft,
                       EnergyWeighting weighting) {
    const double quad = symbol_quadratic_form(state.p, symbol, grid, ft) +
                        symbol_quadratic_form(state.q, symbol, grid, ft);
    const double h_weighted = 0.5 * quad + state.w * state.w;
    if (weighting == EnergyWeighting::CellVolume) return h_weighted;
    return h_weighted / grid.cell_volume();
}

double original_energy(const SavState& state, const ModelParams& params,
                       const SpectralSymbol& symbol, const GridSpec& grid,
                       FourierTransform& ft) {
    const double quad = symbol_quadratic_form(state.p, symbol, grid, ft) +
                        symbol_quadratic_form(state.q, symbol, grid, ft);
    return 0.5 * quad + compute_E(state.p, state.q, params, grid);
}

double discrete_mass_fields(const RealField& p, const RealField& q, const GridSpec& grid) {
    return inner_product(p, p, grid) + inner_product(q, q, grid);
}

double discrete_mass(const SavState& state, const GridSpec& grid) {
    return discrete_mass_fields(state.p, state.q, grid);
}

DriftSeries relative_drifts(const ConservationRecord& record) {
    if (record.samples.empty()) return {};
    const double h0 = record.samples.front().energy;
    const double m0 = record.samples.front().mass;
    if (std::abs(h0) < 1e-14 || std::abs(m0) < 1e-14) {
        std::ostringstream os;
        os << "reference values H0 = " << h0 << ", M0 = " << m0
           << " too close to zero for relative drifts";
        throw DegenerateReference(os.str());
    }

    DriftSeries out;
    out.rh.reserve(record.samples.size());
    out.rm.reserve(record.samples.size());
    for (const auto& s : record.samples) {
        const double rh = std::abs((s.energy - h0) / h0);
        const double rm = std::abs((s.mass - m0) / m0);
        out.rh.push_back(rh);
        out.rm.push_back(rm);
        out.max_rh = std::max(out.max_rh, rh);
        out.max_rm = std::max(out.max_rm, rm);
    }
    return out;
}

void ConservationMonitor::observe(const SavState& state) {
    ConservationSample s;
    s.step = state.step_index;
    s.t = state.t;
    s.energy = modified_energy(state, *symbol_, *grid_, *ft_);
    s.mass = discrete_mass(state, *grid_);
    s.w = state.w;
    s.e_nonlinear = compute_E(state.p, state.q, *params_, *grid_);
    if (log_original_)
        s.energy_original = original_energy(state, *params_, *symbol_, *grid_, *ft_);
    record_.samples.push_back(s);
}

namespace {

bool grids_equal(const GridSpec& a, const GridSpec& b) {
    if (a.dim() != b.dim()) return false;
    for (int i = 0; i < a.dim(); ++i) {
        const Axis& ax = a.axis(i);
        const Axis& bx = b.axis(i);
        if (ax.n != bx.n || ax.x_left != bx.x_left || ax.x_right != bx.x_right) return false;
    }
    return true;
}

bool is_refinement(const GridSpec& coarse, const GridSpec& fine) {
    if (coarse.dim() != fine.dim()) return false;
    for (int i = 0; i < coarse.dim(); ++i) {
        const Axis& c = coarse.axis(i);
        const Axis& f = fine.axis(i);
        if (f.n != 2 * c.n || c.x_left != f.x_left || c.x_right != f.x_right) return false;
    }
    return true;
}

double linf_at_coarse_points(const RealField& coarse, const RealField& fine,
                             const GridSpec& cg, const GridSpec& fg) {
    double m = 0.0;
    if (cg.dim() == 1) {
        for (std::size_t j = 0; j < cg.axis(0).n; ++j)
            m = std::max(m, std::abs(coarse[j] - fine[2 * j]));
    } else {
        for (std::size_t iy = 0; iy < cg.axis(1).n; ++iy)
            for (std::size_t ix = 0; ix < cg.axis(0).n; ++ix)
                m = std::max(m, std::abs(coarse[cg.index(ix, iy)] -
                                         fine[fg.index(2 * ix, 2 * iy)]));
    }
    return m;
}

} // namespace

double error_between_runs(const RealField& p_a, const RealField& q_a, const GridSpec& grid_a,
                          const RealField& p_b, const RealField& q_b, const GridSpec& grid_b) {
    if (grids_equal(grid_a, grid_b))
        return linf_diff(p_a, p_b) + linf_diff(q_a, q_b);
    if (is_refinement(grid_a, grid_b))
        return linf_at_coarse_points(p_a, p_b, grid_a, grid_b) +
               linf_at_coarse_points(q_a, q_b, grid_a, grid_b);
    if (is_refinement(grid_b, grid_a))
        return linf_at_coarse_points(p_b, p_a, grid_b, grid_a) +
               linf_at_coarse_points(q_b, q_a, grid_b, grid_a);
    throw GridMismatch("runs live on unrelated grids; no coarse-in-fine embedding");
}

double convergence_order(double e_coarse, double e_fine) {
    if (!(e_coarse > 0.0) || !(e_fine > 0.0)) {
        std::ostringstream os;
        os << "convergence order undefined for errors " << e_coarse << ", " << e_fine;
        throw InvalidArgument(os.str());
    }
    return std::log2(e_coarse / e_fine);
}

ConvergenceTable make_convergence_table(const std::vector<double>& parameters,
                                        const std::vector<double>& errors,
                                        double floor) {
    if (parameters.size() != errors.size())
        throw ShapeMismatch("convergence table: parameter/error count mismatch");

    ConvergenceTable table;
    table.rows.reserve(parameters.size());
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        ConvergenceRow row;
        row.parameter = parameters[i];
        row.error = errors[i];
        row.at_floor = errors[i] <= floor;
        if (i > 0 && !row.at_floor && !table.rows[i - 1].at_floor)
            row.order = convergence_order(errors[i - 1], errors[i]);
        table.rows.push_back(row);
    }
    return table;
}

} // namespace fsav
