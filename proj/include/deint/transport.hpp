#pragma once

// Discrete probability measures on the time-of-arrival axis and the 1-D
// optimal-transport (W1) distance between them, plus an exact small-instance
// transport LP used to cross-check the closed form.

#include <cstddef>
#include <span>
#include <vector>

namespace deint::transport {

/// Point masses at sorted positions; weights positive and summing to 1.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    /// Sorts by position, merges equal positions, drops zero weights and renormalises.
    /// Throws ValidationError on empty input, negative/non-finite weights or zero total mass.
    DiscreteMeasure(std::vector<double> positions, std::vector<double> weights);

    static DiscreteMeasure dirac(double position);

    std::size_t size() const noexcept { return positions_.size(); }
    bool empty() const noexcept { return positions_.empty(); }
    std::span<const double> positions() const noexcept { return positions_; }
    std::span<const double> weights() const noexcept { return weights_; }

    DiscreteMeasure shifted(double offset) const;

private:
    std::vector<double> positions_;
    std::vector<double> weights_;
};

/// Pulses of one cluster as a measure: atoms at the toas, weights proportional to linear power 10^(level/10).
DiscreteMeasure cluster_measure(std::span<const double> toas, std::span<const double> levels_db);

/// Rebins a measure on uniform Freedman-Diaconis bins (width 2 IQR / N^(1/3)); atoms at non-empty bin centres.
DiscreteMeasure histogram_measure(const DiscreteMeasure& measure);

/// Bin width used by histogram_measure; 0 when all positions coincide.
double freedman_diaconis_width(std::span<const double> positions);

/// Exact W1 distance with |x - y| ground cost: integral of |F_a - F_b|.
double wasserstein_1d(const DiscreteMeasure& a, const DiscreteMeasure& b);

struct TransportPlan {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> flow;  // row-major, rows x cols
    double cost = 0.0;

    double at(std::size_t i, std::size_t j) const { return flow[i * cols + j]; }
};

inline constexpr std::size_t kMaxLpSupport = 64;

/// Optimal plan of the transport LP (min sum C_ij P_ij, P 1 = a, P^T 1 = b) with C_ij = |x_i - y_j|,
/// solved exactly by the transportation simplex (MODI). Both supports must be <= kMaxLpSupport.
TransportPlan solve_ot_lp(const DiscreteMeasure& a, const DiscreteMeasure& b);

}  // namespace deint::transport
