#pragma once

// Labelled interleaved pulse trains: multi-frequency, multi-PRI emitters seen
// through a rotating antenna (periodic lobes), Gaussian estimation noise,
// detection threshold, pulse-width splitting of weak pulses, and outlier
// injection.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "deint/pdw.hpp"

namespace deint::sim {

struct EmitterProfile {
    std::vector<double> frequencies;  // MHz
    std::vector<double> pws;          // ns
    std::vector<double> pris;         // us, staggered cyclically within a dwell
    double power_db = 20.0;           // received level at lobe peak
    double scan_period = 100'000.0;   // us
    double scan_offset = 0.0;         // us, shifts the lobe pattern in time
    double lobe_width = 0.3;          // fraction of the scan period
    double lobe_shoulder = 0.3;       // fraction of the half-lobe taken by the raised-cosine edge
    double lobe_depth_db = 40.0;      // level drop outside the lobe
    double switch_period = 3'000.0;   // us between frequency / pulse-width / PRI-phase redraws
};

struct NoiseModel {
    double freq_std = 0.0;   // MHz
    double pw_std = 0.0;     // ns
    double toa_std = 0.0;    // us
    double level_std = 0.0;  // dB
    double noise_coefficient = 1.0;
    /// Receiver pulse-width resolution, ns; measured widths are rounded to this grid. 0 keeps them continuous.
    double pw_resolution = 0.0;
};

struct ScenarioConfig {
    std::vector<EmitterProfile> emitters;
    double duration = 1e6;  // us
    double detection_threshold_db = -std::numeric_limits<double>::infinity();
    /// Pulses whose noisy level lies within this margin above the threshold get a truncated width.
    double split_margin_db = 3.0;
    NoiseModel noise;
    double outlier_fraction = 0.0;
    std::uint64_t seed = 0;
};

void validate(const EmitterProfile& e);
void validate(const ScenarioConfig& cfg);

/// Lobe gain in dB (0 at the peak, -lobe_depth_db on the floor) at time t.
double lobe_gain_db(const EmitterProfile& e, double t);

/// Train sorted by toa with emitter ids as truth. Applies cfg.outlier_fraction through inject_outliers.
PulseTrain simulate_scenario(const ScenarioConfig& cfg);

/// Adds ceil(f N / (1 - f)) spurious pulses (truth -1): freq and toa uniform over the observed range,
/// pw and level exponential with the train's mean (level shifted by its minimum when the mean is not positive).
PulseTrain inject_outliers(const PulseTrain& train, double fraction, std::uint64_t seed);

ScenarioConfig scale_noise(const ScenarioConfig& cfg, double coefficient);

/// Three emitters with fixed frequencies, pulse widths, PRIs and noise stds,
/// duration chosen for roughly 10^4 pulses.
ScenarioConfig table_scenario(std::uint64_t seed = 0);

/// Three emitters, two of them in neighbouring bands above 900 MHz with identical pulse widths,
/// at elevated noise so that they overlap in the (freq, pw) plane.
ScenarioConfig overlap_scenario(std::uint64_t seed = 0);

/// JSON scenario files (schema in scenarios/README.md).
ScenarioConfig load_scenario(const std::filesystem::path& path);
ScenarioConfig parse_scenario(const std::string& json_text);
std::string scenario_to_json(const ScenarioConfig& cfg);

}  // namespace deint::sim
