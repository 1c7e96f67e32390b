#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "fsav/field.hpp"
#include "fsav/grid.hpp"

// Spectral machinery for the fractional dispersion operator.
//
// Conventions (used everywhere, declared once):
//   * Mode ordering is the standard FFT layout k in {0,...,N/2-1, -N/2,...,-1}
//     per axis; the Nyquist mode k = -N/2 appears once.
//   * Forward transform is unnormalized; the inverse carries 1/N per axis.
//   * The operator is diagonal in Fourier space with per-axis eigenvalues
//     lambda_k = -gamma * |k*mu|^alpha; in 2D the eigenvalue at (k_x, k_y)
//     is lambda_{k_x} + lambda_{k_y} (Kronecker-sum of the axis operators).

namespace fsav {

/// Per-mode eigenvalues of the discrete operator gamma * D^alpha.
class SpectralSymbol {
public:
    SpectralSymbol() = default;

    int dim() const { return dim_; }
    double alpha() const { return alpha_; }
    double gamma() const { return gamma_; }

    std::size_t modes(int axis) const { return values_[static_cast<std::size_t>(axis)].size(); }

    std::span<const double> axis_values(int axis) const {
        return values_[static_cast<std::size_t>(axis)];
    }

    /// Combined eigenvalue at a flattened spectral index (x fastest).
    double value_at(std::size_t flat) const {
        if (dim_ == 1) return values_[0][flat];
        const std::size_t nx = values_[0].size();
        return values_[0][flat % nx] + values_[1][flat / nx];
    }

    std::size_t total_modes() const {
        return dim_ == 2 ? values_[0].size() * values_[1].size() : values_[0].size();
    }

    friend SpectralSymbol build_symbol(const GridSpec&, double, double, bool);

private:
    int dim_ = 0;
    double alpha_ = 0.0;
    double gamma_ = 0.0;
    std::vector<double> values_[2];
};

/// Builds the symbol for a grid. alpha must lie in (1,2]; passing
/// allow_full_alpha_range = true widens the accepted range to (0,2].
SpectralSymbol build_symbol(const GridSpec& grid, double alpha, double gamma,
                            bool allow_full_alpha_range = false);

/// Owns FFTW plans and the complex work buffers for one grid. One instance
/// per run; not safe to share across threads concurrently.
class FourierTransform {
public:
    explicit FourierTransform(const GridSpec& grid);
    ~FourierTransform();

    FourierTransform(const FourierTransform&) = delete;
    FourierTransform& operator=(const FourierTransform&) = delete;

    std::size_t size() const { return total_; }
    const GridSpec& grid() const { return grid_; }

    std::span<std::complex<double>> physical();
    std::span<std::complex<double>> spectral();

    /// physical -> spectral, unnormalized.
    void to_spectral();
    /// spectral -> physical, scaled by 1/(Nx*Ny).
    void to_physical();

private:
    GridSpec grid_;
    std::size_t nx_ = 0, ny_ = 1, total_ = 0;
    void* plan_fwd_ = nullptr;
    void* plan_inv_ = nullptr;
    std::complex<double>* a_ = nullptr; // physical-side buffer
    std::complex<double>* b_ = nullptr; // spectral-side buffer
};

/// Discrete inner product: h * sum(u_j v_j) in 1D, h_x h_y * sum in 2D.
double inner_product(const RealField& u, const RealField& v, const GridSpec& grid);

/// Applies gamma * D^alpha to a real field through the transform. The result
/// is real up to roundoff; the largest discarded imaginary part is reported
/// through imag_residue when non-null.
RealField apply_operator(const RealField& field, const SpectralSymbol& symbol,
                         FourierTransform& ft, double* imag_residue = nullptr);

/// Applies gamma * D^alpha to both parts of a pair in one transform pass
/// (the pair is packed as p + i q).
PairField apply_operator_pair(const PairField& z, const SpectralSymbol& symbol,
                              FourierTransform& ft);

/// h-weighted quadratic form v^T (gamma D^alpha) v, evaluated spectrally.
double symbol_quadratic_form(const RealField& v, const SpectralSymbol& symbol,
                             const GridSpec& grid, FourierTransform& ft);

} // namespace fsav
