#include "fsav/spectral.hpp"

#include <fftw3.h>

#include <cassert>
#include <cmath>
#include <mutex>
#include <sstream>

#include "fsav/errors.hpp"

namespace fsav {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<double> axis_symbol(const Axis& ax, double alpha, double gamma) {
    std::vector<double> values(ax.n);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(ax.n);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t k = (i < n / 2) ? i : i - n; // k = -N/2 appears once
        const double freq = std::abs(static_cast<double>(k) * ax.mu);
        values[static_cast<std::size_t>(i)] = (k == 0) ? 0.0 : -gamma * std::pow(freq, alpha);
    }
    return values;
}

void check_field_size(const RealField& f, std::size_t expected, const char* what) {
    if (f.size() != expected) {
        std::ostringstream os;
        os << what << ": field has " << f.size() << " values, grid has " << expected;
        throw ShapeMismatch(os.str());
    }
}

} // namespace

SpectralSymbol build_symbol(const GridSpec& grid, double alpha, double gamma,
                            bool allow_full_alpha_range) {
    const double alpha_min = allow_full_alpha_range ? 0.0 : 1.0;
    if (!(alpha > alpha_min && alpha <= 2.0)) {
        std::ostringstream os;
        os << "alpha = " << alpha << " outside (" << alpha_min << ",2]";
        throw InvalidArgument(os.str());
    }
    if (!(gamma > 0.0))
        throw InvalidArgument("gamma must be positive");

    SpectralSymbol sym;
    sym.dim_ = grid.dim();
    sym.alpha_ = alpha;
    sym.gamma_ = gamma;
    for (int i = 0; i < grid.dim(); ++i)
        sym.values_[static_cast<std::size_t>(i)] = axis_symbol(grid.axis(i), alpha, gamma);
    return sym;
}

FourierTransform::FourierTransform(const GridSpec& grid) : grid_(grid) {
    nx_ = grid.axis(0).n;
    ny_ = grid.dim() == 2 ? grid.axis(1).n : 1;
    total_ = nx_ * ny_;

    a_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(total_));
    b_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(total_));

    // FFTW_ESTIMATE keeps planning deterministic and leaves buffers untouched.
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* fa = reinterpret_cast<fftw_complex*>(a_);
    auto* fb = reinterpret_cast<fftw_complex*>(b_);
    if (grid.dim() == 1) {
        plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(nx_), fa, fb, FFTW_FORWARD, FFTW_ESTIMATE);
        plan_inv_ = fftw_plan_dft_1d(static_cast<int>(nx_), fb, fa, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
        // x is the fastest-varying axis, so it is FFTW's last dimension.
        plan_fwd_ = fftw_plan_dft_2d(static_cast<int>(ny_), static_cast<int>(nx_), fa, fb,
                                     FFTW_FORWARD, FFTW_ESTIMATE);
        plan_inv_ = fftw_plan_dft_2d(static_cast<int>(ny_), static_cast<int>(nx_), fb, fa,
                                     FFTW_BACKWARD, FFTW_ESTIMATE);
    }
}

FourierTransform::~FourierTransform() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
    fftw_free(a_);
    fftw_free(b_);
}

std::span<std::complex<double>> FourierTransform::physical() { return {a_, total_}; }
std::span<std::complex<double>> FourierTransform::spectral() { return {b_, total_}; }

void FourierTransform::to_spectral() {
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
}

void FourierTransform::to_physical() {
    fftw_execute(static_cast<fftw_plan>(plan_inv_));
    const double scale = 1.0 / static_cast<double>(total_);
    for (std::size_t j = 0; j < total_; ++j) a_[j] *= scale;
}

double inner_product(const RealField& u, const RealField& v, const GridSpec& grid) {
    check_field_size(u, grid.total_points(), "inner_product");
    check_field_size(v, grid.total_points(), "inner_product");
    double acc = 0.0;
    const std::size_t n = u.size();
    for (std::size_t j = 0; j < n; ++j) acc += u[j] * v[j];
    return grid.cell_volume() * acc;
}

namespace {

void check_symbol_grid(const SpectralSymbol& sym, const FourierTransform& ft) {
    if (sym.total_modes() != ft.size())
        throw ShapeMismatch("symbol does not match the transform's grid");
}

// Multiplies the spectral buffer by the per-mode eigenvalue.
void scale_by_symbol(FourierTransform& ft, const SpectralSymbol& sym) {
    auto spec = ft.spectral();
    if (sym.dim() == 1) {
        const auto lam = sym.axis_values(0);
        for (std::size_t i = 0; i < lam.size(); ++i) spec[i] *= lam[i];
    } else {
        const auto lx = sym.axis_values(0);
        const auto ly = sym.axis_values(1);
        std::size_t idx = 0;
        for (std::size_t iy = 0; iy < ly.size(); ++iy)
            for (std::size_t ix = 0; ix < lx.size(); ++ix, ++idx)
                spec[idx] *= lx[ix] + ly[iy];
    }
}

} // namespace

RealField apply_operator(const RealField& field, const SpectralSymbol& symbol,
                         FourierTransform& ft, double* imag_residue) {
    check_field_size(field, ft.size(), "apply_operator");
    check_symbol_grid(symbol, ft);

    auto phys = ft.physical();
    for (std::size_t j = 0; j < field.size(); ++j) phys[j] = field[j];
    ft.to_spectral();
    scale_by_symbol(ft, symbol);
    ft.to_physical();

    RealField out(field.size());
    double residue = 0.0;
    for (std::size_t j = 0; j < field.size(); ++j) {
        out[j] = phys[j].real();
        residue = std::max(residue, std::abs(phys[j].imag()));
    }
    if (imag_residue) *imag_residue = residue;
    assert(residue <= 1e-12 * std::max(1.0, linf_norm(field)));
    return out;
}

PairField apply_operator_pair(const PairField& z, const SpectralSymbol& symbol,
                              FourierTransform& ft) {
    check_field_size(z.p, ft.size(), "apply_operator_pair");
    check_field_size(z.q, ft.size(), "apply_operator_pair");
    check_symbol_grid(symbol, ft);

    auto phys = ft.physical();
    for (std::size_t j = 0; j < z.p.size(); ++j) phys[j] = {z.p[j], z.q[j]};
    ft.to_spectral();
    scale_by_symbol(ft, symbol);
    ft.to_physical();

    PairField out{RealField(z.p.size()), RealField(z.q.size())};
    for (std::size_t j = 0; j < z.p.size(); ++j) {
        out.p[j] = phys[j].real();
        out.q[j] = phys[j].imag();
    }
    return out;
}

double symbol_quadratic_form(const RealField& v, const SpectralSymbol& symbol,
                             const GridSpec& grid, FourierTransform& ft) {
    check_field_size(v, ft.size(), "symbol_quadratic_form");
    check_symbol_grid(symbol, ft);

    auto phys = ft.physical();
    for (std::size_t j = 0; j < v.size(); ++j) phys[j] = v[j];
    ft.to_spectral();
    auto spec = ft.spectral();

    double acc = 0.0;
    if (symbol.dim() == 1) {
        const auto lam = symbol.axis_values(0);
        for (std::size_t i = 0; i < lam.size(); ++i) acc += lam[i] * std::norm(spec[i]);
    } else {
        const auto lx = symbol.axis_values(0);
        const auto ly = symbol.axis_values(1);
        std::size_t idx = 0;
        for (std::size_t iy = 0; iy < ly.size(); ++iy)
            for (std::size_t ix = 0; ix < lx.size(); ++ix, ++idx)
                acc += (lx[ix] + ly[iy]) * std::norm(spec[idx]);
    }
    // Parseval: sum_j u_j v_j = (1/Ntot) sum_k u_hat conj(v_hat).
    return grid.cell_volume() * acc / static_cast<double>(ft.size());
}

} // namespace fsav
