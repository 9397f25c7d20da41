#pragma once

// Monte-Carlo robustness sweeps over injected outlier rate or noise
// coefficient. Realizations run on a worker pool; results are stored by
// (grid index, realization) so the table does not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "deint/metrics.hpp"
#include "deint/pdw.hpp"
#include "deint/simulator.hpp"

namespace deint::sweep {

enum class Kind { Outliers, Noise };
enum class Method { HacotKs, IhacotKs, IhacotMix };

std::string_view kind_name(Kind k);
Kind parse_kind(std::string_view s);
std::string_view method_name(Method m);
/// "hacot-ks", "ihacot-ks", "ihacot-mix".
Method parse_method(std::string_view s);

/// Default configuration of each method.
Labeling run_method(Method m, const PulseTrain& train);

struct SweepSpec {
    Kind kind = Kind::Outliers;
    std::vector<double> grid;
    std::size_t realizations = 50;
    std::vector<Method> methods{Method::HacotKs, Method::IhacotKs, Method::IhacotMix};
    sim::ScenarioConfig base;
    std::uint64_t base_seed = 0;
    std::size_t threads = 0;  // 0: hardware concurrency
};

/// Grid non-empty, sorted, in [0, 0.9] for outliers or [1, 10] for noise; realizations >= 1; methods non-empty.
void validate(const SweepSpec& spec);

/// Signal of one (grid point, realization): seed base_seed + realization; outliers are injected with
/// a seed derived from it, or the noise stds are scaled by the grid value.
PulseTrain realization_train(const SweepSpec& spec, std::size_t grid_index, std::size_t realization);

struct RunRecord {
    std::size_t grid_index = 0;
    std::size_t realization = 0;
    Method method = Method::HacotKs;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    metrics::RunSummary summary;
};

struct Moments {
    double mean = 0.0;
    double std = 0.0;  // sample std, 0 below two runs
};

struct Cell {
    double value = 0.0;
    Method method = Method::HacotKs;
    std::size_t runs = 0;
    std::size_t failures = 0;
    Moments ari, detected_emitters, outlier_fraction, injected_in_clusters;
};

struct SweepTable {
    std::vector<Cell> cells;      // grid-major, then methods in spec order
    std::vector<RunRecord> runs;  // (grid, realization, method) order
};

SweepTable run_sweep(const SweepSpec& spec);

void write_csv(const SweepTable& table, Kind kind, const std::filesystem::path& path);
std::string csv_text(const SweepTable& table, Kind kind);
/// Config, seeds and build information.
std::string manifest_json(const SweepSpec& spec, const SweepTable& table);

}  // namespace deint::sweep
