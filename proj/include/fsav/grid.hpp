#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace fsav {

/// One periodic axis: N collocation points x_j = x_left + j*h, j = 0..N-1.
/// x_right is excluded (periodic identification).
struct Axis {
    double x_left = 0.0;
    double x_right = 0.0;
    std::size_t n = 0;
    double h = 0.0;  // (x_right - x_left) / n
    double mu = 0.0; // fundamental wavenumber 2*pi / (x_right - x_left)

    double point(std::size_t j) const { return x_left + static_cast<double>(j) * h; }

    std::vector<double> points() const {
        std::vector<double> xs(n);
        for (std::size_t j = 0; j < n; ++j) xs[j] = point(j);
        return xs;
    }
};

struct AxisRequest {
    double x_left = 0.0;
    double x_right = 0.0;
    std::size_t n = 0;
};

/// Periodic collocation grid, 1D or 2D. Immutable once built.
class GridSpec {
public:
    GridSpec() = default;

    int dim() const { return dim_; }
    const Axis& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }

    std::size_t total_points() const {
        return dim_ == 2 ? axes_[0].n * axes_[1].n : axes_[0].n;
    }

    /// h in 1D, h_x * h_y in 2D; the weight of the discrete inner product.
    double cell_volume() const {
        return dim_ == 2 ? axes_[0].h * axes_[1].h : axes_[0].h;
    }

    /// Flat index with x the fastest-varying axis.
    std::size_t index(std::size_t ix, std::size_t iy = 0) const {
        return iy * axes_[0].n + ix;
    }

    bool same_shape(const GridSpec& other) const {
        if (dim_ != other.dim_) return false;
        for (int i = 0; i < dim_; ++i)
            if (axes_[static_cast<std::size_t>(i)].n != other.axes_[static_cast<std::size_t>(i)].n)
                return false;
        return true;
    }

    friend GridSpec build_grid(int dim, std::span<const AxisRequest> axes);

private:
    int dim_ = 0;
    std::array<Axis, 2> axes_{};
};

/// Validates and assembles a grid. Rejects odd or tiny N and inverted domains.
GridSpec build_grid(int dim, std::span<const AxisRequest> axes);

GridSpec build_grid_1d(double x_left, double x_right, std::size_t n);

/// Square 2D grid: the same extent and resolution on both axes.
GridSpec build_grid_2d(double x_left, double x_right, std::size_t n);

} // namespace fsav
