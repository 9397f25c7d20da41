#pragma once

// Data-parallel inner loops behind the O(N^2) stages (k-NN core distances and
// Prim's MST on the mutual-reachability graph).
//
// Every kernel has a scalar reference implementation and, where the CPU
// supports it, an AVX2 variant picked at runtime. Variants evaluate the same
// IEEE operations in the same order (no FMA), so their outputs are identical
// bit for bit; tests/unit/test_simd.cpp checks this.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace deint::simd {

/// Points stored column-major: cols[c][j] is coordinate c of point j.
struct PointsView {
    const double* const* cols = nullptr;
    std::size_t dims = 0;
    std::size_t count = 0;
};

struct KernelTable {
    std::string_view name;

    /// out[j] = sum over c of (cols[c][j] - query[c])^2, accumulated in column order.
    void (*squared_distances)(PointsView points, const double* query, double* out);

    /// One Prim relaxation step for vertex u (coordinates `query`, squared core distance core2_u):
    ///   w = max(d2(u, j), core2[j], core2_u); if w < best[j] then best[j] = w, from[j] = u.
    /// Vertices already in the tree must carry core2[j] = best[j] = +inf.
    /// Returns the index of the smallest best[j] after the update (lowest index on ties).
    std::size_t (*prim_relax)(PointsView points, const double* query, double core2_u, const double* core2,
                              double* best, std::int32_t* from, std::int32_t u);
};

const KernelTable& scalar_kernels();

/// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Best available table. DEINT_SIMD=scalar in the environment forces the reference path.
const KernelTable& active_kernels();

}  // namespace deint::simd
