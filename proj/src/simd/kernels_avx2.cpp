// Compiled with -mavx2 only; nothing here runs unless the CPU reports AVX2.

#include <immintrin.h>

#include <algorithm>
#include <limits>

#include "deint/simd/kernels.hpp"

namespace deint::simd::detail {
namespace {

void squared_distances_avx2(PointsView points, const double* query, double* out) {
    const std::size_t n = points.count;
    const std::size_t vec_end = n & ~std::size_t{3};
    std::fill(out, out + n, 0.0);
    for (std::size_t c = 0; c < points.dims; ++c) {
        const double* col = points.cols[c];
        const double q = query[c];
        const __m256d qv = _mm256_set1_pd(q);
        std::size_t j = 0;
        for (; j < vec_end; j += 4) {
            const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(col + j), qv);
            const __m256d acc = _mm256_loadu_pd(out + j);
            _mm256_storeu_pd(out + j, _mm256_add_pd(acc, _mm256_mul_pd(d, d)));
        }
        for (; j < n; ++j) {
            const double d = col[j] - q;
            out[j] = out[j] + d * d;
        }
    }
}

std::size_t prim_relax_avx2(PointsView points, const double* query, double core2_u, const double* core2,
                            double* best, std::int32_t* from, std::int32_t u) {
    const std::size_t n = points.count;
    const std::size_t vec_end = n & ~std::size_t{3};
    const double inf = std::numeric_limits<double>::infinity();

    __m256d min_v = _mm256_set1_pd(inf);
    __m256d min_i = _mm256_set1_pd(-1.0);  // indices carried as doubles (exact below 2^53)
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d four = _mm256_set1_pd(4.0);
    const __m256d core_u = _mm256_set1_pd(core2_u);

    std::size_t j = 0;
    for (; j < vec_end; j += 4) {
        __m256d d2 = _mm256_setzero_pd();
        for (std::size_t c = 0; c < points.dims; ++c) {
            const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(points.cols[c] + j), _mm256_set1_pd(query[c]));
            d2 = _mm256_add_pd(d2, _mm256_mul_pd(d, d));
        }
        const __m256d w = _mm256_max_pd(_mm256_max_pd(d2, _mm256_loadu_pd(core2 + j)), core_u);
        __m256d b = _mm256_loadu_pd(best + j);
        const __m256d better = _mm256_cmp_pd(w, b, _CMP_LT_OQ);
        const int mask = _mm256_movemask_pd(better);
        if (mask != 0) {
            b = _mm256_blendv_pd(b, w, better);
            _mm256_storeu_pd(best + j, b);
            for (int lane = 0; lane < 4; ++lane)
                if (mask & (1 << lane)) from[j + lane] = u;
        }
        const __m256d lower = _mm256_cmp_pd(b, min_v, _CMP_LT_OQ);
        min_v = _mm256_blendv_pd(min_v, b, lower);
        min_i = _mm256_blendv_pd(min_i, idx, lower);
        idx = _mm256_add_pd(idx, four);
    }

    alignas(32) double lane_v[4];
    alignas(32) double lane_i[4];
    _mm256_store_pd(lane_v, min_v);
    _mm256_store_pd(lane_i, min_i);
    double min_val = inf;
    std::size_t min_idx = n;
    for (int lane = 0; lane < 4; ++lane) {
        if (lane_i[lane] < 0.0) continue;
        const auto li = static_cast<std::size_t>(lane_i[lane]);
        if (lane_v[lane] < min_val || (lane_v[lane] == min_val && li < min_idx)) {
            min_val = lane_v[lane];
            min_idx = li;
        }
    }

    for (; j < n; ++j) {
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

const KernelTable& avx2_table() {
    static const KernelTable table{"avx2", &squared_distances_avx2, &prim_relax_avx2};
    return table;
}

}  // namespace deint::simd::detail
