#include "deint/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "deint/error.hpp"
#include "deint/hacot.hpp"
#include "deint/ihacot.hpp"
#include "deint/simd/kernels.hpp"

namespace deint::sweep {

std::string_view kind_name(Kind k) { return k == Kind::Outliers ? "outliers" : "noise"; }

Kind parse_kind(std::string_view s) {
    if (s == "outliers") return Kind::Outliers;
    if (s == "noise") return Kind::Noise;
    throw ValidationError("unknown sweep kind '" + std::string(s) + "'");
}

std::string_view method_name(Method m) {
    switch (m) {
        case Method::HacotKs: return "hacot-ks";
        case Method::IhacotKs: return "ihacot-ks";
        case Method::IhacotMix: return "ihacot-mix";
    }
    return "?";
}

Method parse_method(std::string_view s) {
    for (Method m : {Method::HacotKs, Method::IhacotKs, Method::IhacotMix})
        if (method_name(m) == s) return m;
    throw ValidationError("unknown method '" + std::string(s) + "'");
}

Labeling run_method(Method m, const PulseTrain& train) {
    switch (m) {
        case Method::HacotKs: return hacot::run_hacot(train, {});
        case Method::IhacotKs: return ihacot::run_ihacot(train, {});
        case Method::IhacotMix: {
            ihacot::IhacotConfig cfg;
            cfg.pre_test = stats::TestKind::Student;
            return ihacot::run_ihacot(train, cfg);
        }
    }
    throw ValidationError("unknown method");
}

void validate(const SweepSpec& spec) {
    if (spec.grid.empty()) throw ValidationError("sweep grid is empty");
    if (!std::is_sorted(spec.grid.begin(), spec.grid.end())) throw ValidationError("sweep grid must be sorted");
    const double lo = spec.kind == Kind::Outliers ? 0.0 : 1.0;
    const double hi = spec.kind == Kind::Outliers ? 0.9 : 10.0;
    for (double v : spec.grid)
        if (!(v >= lo && v <= hi))
            throw ValidationError("sweep grid value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
    if (spec.realizations < 1) throw ValidationError("realizations must be >= 1");
    if (spec.methods.empty()) throw ValidationError("no methods selected");
    sim::validate(spec.base);
}

PulseTrain realization_train(const SweepSpec& spec, std::size_t grid_index, std::size_t realization) {
    const double v = spec.grid.at(grid_index);
    sim::ScenarioConfig cfg = spec.kind == Kind::Noise ? sim::scale_noise(spec.base, v) : spec.base;
    cfg.seed = spec.base_seed + realization;
    cfg.outlier_fraction = 0.0;
    PulseTrain train = sim::simulate_scenario(cfg);
    if (spec.kind == Kind::Outliers && v > 0.0)
        train = sim::inject_outliers(train, v, cfg.seed ^ (0xa0761d6478bd642fULL * (grid_index + 1)));
    return train;
}

namespace {

Moments moments(const std::vector<double>& v) {
    Moments m;
    if (v.empty()) return m;
    const double n = static_cast<double>(v.size());
    for (double x : v) m.mean += x;
    m.mean /= n;
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - m.mean) * (x - m.mean);
        m.std = std::sqrt(ss / (n - 1.0));
    }
    return m;
}

// shortest form that reads back to the same double
std::string num(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace

SweepTable run_sweep(const SweepSpec& spec) {
    validate(spec);
    const std::size_t g = spec.grid.size(), r = spec.realizations, k = spec.methods.size();
    SweepTable table;
    table.runs.resize(g * r * k);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < g * r; job = next++) {
            const std::size_t gi = job / r, ri = job % r;
            std::optional<PulseTrain> train;
            std::string sim_error;
            try {
                train = realization_train(spec, gi, ri);
            } catch (const std::exception& e) {
                sim_error = e.what();
            }
            for (std::size_t mi = 0; mi < k; ++mi) {
                RunRecord& rec = table.runs[job * k + mi];
                rec.grid_index = gi;
                rec.realization = ri;
                rec.method = spec.methods[mi];
                rec.seed = spec.base_seed + ri;
                if (!train) {
                    rec.error = sim_error;
                    continue;
                }
                try {
                    const Labeling pred = run_method(rec.method, *train);
                    std::vector<bool> injected;
                    for (int t : *train->truth()) injected.push_back(t < 0);
                    rec.summary = metrics::summarize_run(Labeling{*train->truth()}, pred, injected);
                    rec.ok = true;
                } catch (const std::exception& e) {
                    rec.error = e.what();
                }
            }
        }
    };
    std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, g * r);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t gi = 0; gi < g; ++gi)
        for (std::size_t mi = 0; mi < k; ++mi) {
            Cell c;
            c.value = spec.grid[gi];
            c.method = spec.methods[mi];
            std::vector<double> ari, det, out, inj;
            for (std::size_t ri = 0; ri < r; ++ri) {
                const RunRecord& rec = table.runs[(gi * r + ri) * k + mi];
                ++c.runs;
                if (!rec.ok) {
                    ++c.failures;
                    continue;
                }
                ari.push_back(rec.summary.ari);
                det.push_back(rec.summary.detected_emitters);
                out.push_back(rec.summary.outlier_fraction);
                inj.push_back(rec.summary.injected_in_clusters);
            }
            c.ari = moments(ari);
            c.detected_emitters = moments(det);
            c.outlier_fraction = moments(out);
            c.injected_in_clusters = moments(inj);
            table.cells.push_back(c);
        }
    return table;
}

std::string csv_text(const SweepTable& table, Kind kind) {
    std::ostringstream os;
    os << (kind == Kind::Outliers ? "outlier_fraction_added" : "noise_coefficient")
       << ",method,runs,failures,ari_mean,ari_std,detected_emitters_mean,detected_emitters_std,"
          "outlier_fraction_mean,outlier_fraction_std,injected_in_clusters_mean,injected_in_clusters_std\n";
    for (const Cell& c : table.cells) {
        os << num(c.value) << ',' << method_name(c.method) << ',' << c.runs << ',' << c.failures;
        for (const Moments* m : {&c.ari, &c.detected_emitters, &c.outlier_fraction, &c.injected_in_clusters})
            os << ',' << num(m->mean) << ',' << num(m->std);
        os << '\n';
    }
    return os.str();
}

void write_csv(const SweepTable& table, Kind kind, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write " + path.string());
    f << csv_text(table, kind);
}

std::string manifest_json(const SweepSpec& spec, const SweepTable& table) {
    using nlohmann::json;
    json j;
    j["kind"] = kind_name(spec.kind);
    j["grid"] = spec.grid;
    j["realizations"] = spec.realizations;
    j["base_seed"] = spec.base_seed;
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < spec.realizations; ++i) seeds.push_back(spec.base_seed + i);
    j["seeds"] = seeds;
    for (Method m : spec.methods) j["methods"].push_back(method_name(m));
    j["scenario"] = json::parse(sim::scenario_to_json(spec.base));
    json failures = json::array();
    for (const RunRecord& rec : table.runs)
        if (!rec.ok)
            failures.push_back({{"grid_index", rec.grid_index}, {"realization", rec.realization},
                                {"method", method_name(rec.method)}, {"error", rec.error}});
    j["failures"] = failures;
    j["build"] = {{"compiler", __VERSION__}, {"cxx_standard", __cplusplus}, {"kernels", simd::active_kernels().name}};
    return j.dump(2);
}

}  // namespace deint::sweep
