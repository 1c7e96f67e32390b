#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fsav/field.hpp"
#include "fsav/grid.hpp"
#include "fsav/model.hpp"
#include "fsav/spectral.hpp"

namespace fsav {

/// Weighting of the energy quadratic form. CellVolume is the canonical
/// reporting choice; Unweighted divides the whole energy by the cell volume
/// (both are exactly conserved, they differ by that constant factor).
enum class EnergyWeighting { CellVolume, Unweighted };

/// Modified energy conserved by the scheme:
///   H = (1/2)[(P, D P) + (Q, D Q)] + w^2
/// with the cell-volume-weighted quadratic form (D = gamma D^alpha, which is
/// negative semidefinite, so the quadratic part enters with a minus sign in
/// magnitude).
double modified_energy(const SavState& state, const SpectralSymbol& symbol,
                       const GridSpec& grid, FourierTransform& ft,
                       EnergyWeighting weighting = EnergyWeighting::CellVolume);

/// Original (non-modified) energy: (1/2)[(P,DP)+(Q,DQ)] + E(P,Q). Not
/// conserved by the scheme; its drift vanishes at second order in tau.
double original_energy(const SavState& state, const ModelParams& params,
                       const SpectralSymbol& symbol, const GridSpec& grid,
                       FourierTransform& ft);

/// Discrete mass (P,P) + (Q,Q) with cell-volume weighting.
double discrete_mass_fields(const RealField& p, const RealField& q, const GridSpec& grid);
double discrete_mass(const SavState& state, const GridSpec& grid);

struct ConservationSample {
    std::int64_t step = 0;
    double t = 0.0;
    double energy = 0.0; // H
    double mass = 0.0;   // M
    double w = 0.0;
    double e_nonlinear = 0.0;                 // E(P,Q) recomputed
    std::optional<double> energy_original{};  // only when requested
};

struct ConservationRecord {
    std::vector<ConservationSample> samples;
};

struct DriftSeries {
    std::vector<double> rh; // |(H^m - H^0)/H^0|
    std::vector<double> rm; // |(M^m - M^0)/M^0|
    double max_rh = 0.0;
    double max_rm = 0.0;
};

/// Relative drifts against the first sample. Throws DegenerateReference when
/// |H^0| or |M^0| < 1e-14.
DriftSeries relative_drifts(const ConservationRecord& record);

/// Observer that records (t, H, M, w, E) along a trajectory.
class ConservationMonitor {
public:
    ConservationMonitor(const ModelParams& params, const GridSpec& grid,
                        const SpectralSymbol& symbol, FourierTransform& ft,
                        bool log_original_energy = false)
        : params_(&params), grid_(&grid), symbol_(&symbol), ft_(&ft),
          log_original_(log_original_energy) {}

    void observe(const SavState& state);
    /// Appends a sample computed elsewhere (used by the CNF recording path).
    void push(const ConservationSample& sample) { record_.samples.push_back(sample); }
    const ConservationRecord& record() const { return record_; }

private:
    const ModelParams* params_;
    const GridSpec* grid_;
    const SpectralSymbol* symbol_;
    FourierTransform* ft_;
    bool log_original_;
    ConservationRecord record_;
};

/// l-inf error between two runs: ||dP||_inf + ||dQ||_inf. Grids must either
/// match or form a coarse-in-fine pair (the finer run has 2N points per axis
/// over the same domain); in the latter case the comparison happens at the
/// coarse collocation points.
double error_between_runs(const RealField& p_a, const RealField& q_a, const GridSpec& grid_a,
                          const RealField& p_b, const RealField& q_b, const GridSpec& grid_b);

/// log2(e_coarse / e_fine). Throws InvalidArgument when either error is <= 0.
double convergence_order(double e_coarse, double e_fine);

struct ConvergenceRow {
    double parameter = 0.0; // tau or N
    double error = 0.0;
    std::optional<double> order{}; // empty on the first row
    bool at_floor = false;         // error at the roundoff floor; order not meaningful
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

/// Pairs consecutive errors into orders; errors at or below `floor` mark the
/// affected rows instead of producing an order.
ConvergenceTable make_convergence_table(const std::vector<double>& parameters,
                                        const std::vector<double>& errors,
                                        double floor = 1e-13);

} // namespace fsav
