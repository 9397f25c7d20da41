#pragma once

// Pulse description words (PDW), labelings and feature matrices.
//
// Units: toa in microseconds, freq in MHz, pw in nanoseconds, level in dB.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace deint {

inline constexpr int kOutlier = -1;

struct Pulse {
    double toa = 0.0;    // us
    double freq = 0.0;   // MHz
    double pw = 0.0;     // ns
    double level = 0.0;  // dB
};

/// Throws ValidationError unless toa/level are finite and freq, pw > 0.
void validate(const Pulse& p);

/// Pulses sorted by toa (stable), with optional per-pulse emitter ids.
/// Construction validates every pulse and sorts; truth follows its pulse.
class PulseTrain {
public:
    PulseTrain() = default;
    explicit PulseTrain(std::vector<Pulse> pulses, std::optional<std::vector<int>> truth = std::nullopt);

    std::size_t size() const noexcept { return pulses_.size(); }
    bool empty() const noexcept { return pulses_.empty(); }
    const std::vector<Pulse>& pulses() const noexcept { return pulses_; }
    const Pulse& operator[](std::size_t i) const { return pulses_[i]; }
    const std::optional<std::vector<int>>& truth() const noexcept { return truth_; }
    bool has_truth() const noexcept { return truth_.has_value(); }

    std::vector<double> toas() const;
    std::vector<double> levels() const;

private:
    std::vector<Pulse> pulses_;
    std::optional<std::vector<int>> truth_;
};

/// One label per pulse; kOutlier for noise.
struct Labeling {
    std::vector<int> labels;

    std::size_t size() const noexcept { return labels.size(); }
    int operator[](std::size_t i) const { return labels[i]; }
    /// Number of distinct non-outlier labels.
    std::size_t cluster_count() const;
    std::size_t outlier_count() const;
};

/// Relabel non-negative labels 0..K-1 in order of first appearance. Negative labels become kOutlier.
Labeling canonicalize(const Labeling& in);

enum class Feature { Toa, Freq, Pw, Level };

std::string_view feature_name(Feature f);
/// Accepts "toa", "freq", "pw", "level". Throws ValidationError otherwise.
Feature parse_feature(std::string_view name);

/// Column-major matrix: one column per named feature, one row per pulse.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::vector<std::string> names, std::vector<std::vector<double>> columns);

    std::size_t rows() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
    std::size_t cols() const noexcept { return columns_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::span<const double> column(std::size_t c) const { return columns_[c]; }
    double at(std::size_t row, std::size_t col) const { return columns_[col][row]; }

    /// Row subset, preserving column names.
    FeatureMatrix select_rows(std::span<const std::size_t> rows) const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

FeatureMatrix feature_matrix(const PulseTrain& train, std::span<const Feature> columns);
FeatureMatrix feature_matrix(const PulseTrain& train, std::span<const std::string> columns);

/// Map every column to [0,1] by empirical rank r/(N-1), ties sharing their average rank.
/// A constant column maps to 0.5. Requires at least 2 rows.
FeatureMatrix quantile_normalize(const FeatureMatrix& features);

/// Reads the PDW CSV (`toa_us,freq_mhz,pw_ns,level_db[,emitter][,label]`).
PulseTrain load_pulses(const std::filesystem::path& path);

/// Same as load_pulses but also returns the `label` column when present (aligned to the sorted train).
struct LoadedPulses {
    PulseTrain train;
    std::optional<Labeling> labels;
};
LoadedPulses load_labeled_pulses(const std::filesystem::path& path);

/// Writes the PDW CSV; `emitter` is written when the train carries truth, `label` when given.
void save_pulses(const PulseTrain& train, const std::optional<Labeling>& labels, const std::filesystem::path& path);

}  // namespace deint
