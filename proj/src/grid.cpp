#include "fsav/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fsav/errors.hpp"

namespace fsav {

GridSpec build_grid(int dim, std::span<const AxisRequest> axes) {
    if (dim != 1 && dim != 2)
        throw InvalidArgument("grid dimension must be 1 or 2");
    if (axes.size() != static_cast<std::size_t>(dim))
        throw InvalidArgument("axis count does not match grid dimension");

    GridSpec grid;
    grid.dim_ = dim;
    for (int i = 0; i < dim; ++i) {
        const AxisRequest& req = axes[static_cast<std::size_t>(i)];
        if (!(req.x_right > req.x_left)) {
            std::ostringstream os;
            os << "axis " << i << ": x_right (" << req.x_right
               << ") must exceed x_left (" << req.x_left << ")";
            throw InvalidArgument(os.str());
        }
        if (req.n < 4 || req.n % 2 != 0) {
            std::ostringstream os;
            os << "axis " << i << ": N must be an even integer >= 4, got " << req.n;
            throw InvalidArgument(os.str());
        }
        Axis& ax = grid.axes_[static_cast<std::size_t>(i)];
        ax.x_left = req.x_left;
        ax.x_right = req.x_right;
        ax.n = req.n;
        const double length = req.x_right - req.x_left;
        ax.h = length / static_cast<double>(req.n);
        ax.mu = 2.0 * std::numbers::pi / length;
    }
    return grid;
}

GridSpec build_grid_1d(double x_left, double x_right, std::size_t n) {
    const AxisRequest req{x_left, x_right, n};
    return build_grid(1, std::span<const AxisRequest>(&req, 1));
}

GridSpec build_grid_2d(double x_left, double x_right, std::size_t n) {
    const AxisRequest reqs[2] = {{x_left, x_right, n}, {x_left, x_right, n}};
    return build_grid(2, std::span<const AxisRequest>(reqs, 2));
}

} // namespace fsav
