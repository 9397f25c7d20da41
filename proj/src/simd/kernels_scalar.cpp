#include <algorithm>
#include <limits>

#include "deint/simd/kernels.hpp"

namespace deint::simd {
namespace {

void squared_distances_scalar(PointsView points, const double* query, double* out) {
    const std::size_t n = points.count;
    std::fill(out, out + n, 0.0);
    for (std::size_t c = 0; c < points.dims; ++c) {
        const double* col = points.cols[c];
        const double q = query[c];
        for (std::size_t j = 0; j < n; ++j) {
            const double d = col[j] - q;
            out[j] = out[j] + d * d;
        }
    }
}

std::size_t prim_relax_scalar(PointsView points, const double* query, double core2_u, const double* core2,
                              double* best, std::int32_t* from, std::int32_t u) {
    const std::size_t n = points.count;
    double min_val = std::numeric_limits<double>::infinity();
    std::size_t min_idx = n;
    for (std::size_t j = 0; j < n; ++j) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < points.dims; ++c) {
            const double d = points.cols[c][j] - query[c];
            d2 = d2 + d * d;
        }
        const double w = std::max(std::max(d2, core2[j]), core2_u);
        if (w < best[j]) {
            best[j] = w;
            from[j] = u;
        }
        if (best[j] < min_val) {
            min_val = best[j];
            min_idx = j;
        }
    }
    return min_idx;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", &squared_distances_scalar, &prim_relax_scalar};
    return table;
}

}  // namespace deint::simd
