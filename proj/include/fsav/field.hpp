#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace fsav {

/// Real values on the collocation grid, one per point.
/// 2D fields are stored row-major with x the fastest-varying axis.
using RealField = std::vector<double>;

/// A stacked pair of real fields treated as one vector by the linear solves.
/// For the solution this is (P, Q); for the SAV coupling term it is (B1, B2).
struct PairField {
    RealField p;
    RealField q;
};

inline double linf_norm(const RealField& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double linf_diff(const RealField& a, const RealField& b) {
    double m = 0.0;
    const std::size_t n = a.size();
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

} // namespace fsav
