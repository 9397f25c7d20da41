#include "deint/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "deint/error.hpp"

namespace deint::sim {
namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream, std::uint32_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream, purpose};
    return std::mt19937_64(seq);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

}  // namespace

void validate(const EmitterProfile& e) {
    require(!e.frequencies.empty() && !e.pws.empty() && !e.pris.empty(),
            "emitter needs non-empty frequencies, pws and pris");
    for (double f : e.frequencies) require(f > 0.0 && std::isfinite(f), "emitter frequencies must be > 0");
    for (double p : e.pws) require(p > 0.0 && std::isfinite(p), "emitter pulse widths must be > 0");
    for (double p : e.pris) require(p > 0.0 && std::isfinite(p), "emitter PRIs must be > 0");
    require(std::isfinite(e.power_db), "emitter power must be finite");
    require(e.scan_period > 0.0, "emitter scan period must be > 0");
    require(e.lobe_width > 0.0 && e.lobe_width < 1.0, "emitter lobe width must be in (0,1)");
    require(e.lobe_shoulder >= 0.0 && e.lobe_shoulder <= 1.0, "emitter lobe shoulder must be in [0,1]");
    require(e.lobe_depth_db >= 0.0, "emitter lobe depth must be >= 0");
    require(e.switch_period > 0.0, "emitter switch period must be > 0");
}

void validate(const ScenarioConfig& cfg) {
    require(!cfg.emitters.empty(), "scenario needs at least one emitter");
    require(cfg.duration > 0.0 && std::isfinite(cfg.duration), "scenario duration must be > 0");
    for (const auto& e : cfg.emitters) validate(e);
    const auto& n = cfg.noise;
    require(n.freq_std >= 0.0 && n.pw_std >= 0.0 && n.toa_std >= 0.0 && n.level_std >= 0.0,
            "noise stds must be >= 0");
    require(n.noise_coefficient >= 1.0, "noise coefficient must be >= 1");
    require(n.pw_resolution >= 0.0 && std::isfinite(n.pw_resolution), "pw resolution must be >= 0");
    require(cfg.outlier_fraction >= 0.0 && cfg.outlier_fraction < 1.0, "outlier fraction must be in [0,1)");
    require(cfg.split_margin_db >= 0.0, "split margin must be >= 0");
}

double lobe_gain_db(const EmitterProfile& e, double t) {
    double phase = std::fmod(t + e.scan_offset, e.scan_period) / e.scan_period;
    if (phase < 0.0) phase += 1.0;
    const double u = std::abs(phase - 0.5) / (0.5 * e.lobe_width);  // 0 at the peak, 1 at the lobe edge
    if (u >= 1.0) return -e.lobe_depth_db;
    const double flat = 1.0 - e.lobe_shoulder;
    if (u <= flat) return 0.0;
    const double s = (u - flat) / e.lobe_shoulder;
    return -e.lobe_depth_db * 0.5 * (1.0 - std::cos(std::numbers::pi * s));
}

PulseTrain simulate_scenario(const ScenarioConfig& cfg) {
    validate(cfg);
    const auto& noise = cfg.noise;
    const double k = noise.noise_coefficient;

    std::vector<Pulse> pulses;
    std::vector<int> truth;
    for (std::size_t id = 0; id < cfg.emitters.size(); ++id) {
        const auto& e = cfg.emitters[id];
        auto rng = make_rng(cfg.seed, static_cast<std::uint32_t>(id), 1);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uniform_int_distribution<std::size_t> pick_f(0, e.frequencies.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_pw(0, e.pws.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_pri(0, e.pris.size() - 1);

        double t = unit(rng) * e.pris.front();
        double dwell_end = -1.0;
        std::size_t fi = 0, pwi = 0, prii = 0;
        while (t < cfg.duration) {
            if (t >= dwell_end) {
                dwell_end = (std::floor(t / e.switch_period) + 1.0) * e.switch_period;
                fi = pick_f(rng);
                pwi = pick_pw(rng);
                prii = pick_pri(rng);
            }
            const double level = e.power_db + lobe_gain_db(e, t);
            // draw all noise terms unconditionally so detection does not shift the random stream
            const double nf = gauss(rng), npw = gauss(rng), nt = gauss(rng), nl = gauss(rng);
            const double split = unit(rng);
            const double noisy_level = level + nl * noise.level_std * k;
            if (noisy_level >= cfg.detection_threshold_db) {
                Pulse p;
                p.toa = t + nt * noise.toa_std * k;
                p.freq = std::max(e.frequencies[fi] + nf * noise.freq_std * k, 1e-3);
                p.pw = e.pws[pwi] + npw * noise.pw_std * k;
                if (noisy_level < cfg.detection_threshold_db + cfg.split_margin_db) p.pw *= 0.1 + 0.9 * split;
                if (noise.pw_resolution > 0.0)
                    p.pw = std::max(std::round(p.pw / noise.pw_resolution), 1.0) * noise.pw_resolution;
                p.pw = std::max(p.pw, 1e-3);
                p.level = noisy_level;
                pulses.push_back(p);
                truth.push_back(static_cast<int>(id));
            }
            t += e.pris[prii];
            prii = (prii + 1) % e.pris.size();
        }
    }
    PulseTrain train(std::move(pulses), std::move(truth));
    if (cfg.outlier_fraction > 0.0 && !train.empty())
        return inject_outliers(train, cfg.outlier_fraction, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    return train;
}

PulseTrain inject_outliers(const PulseTrain& train, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 0.95)) throw ValidationError("outlier fraction must be in [0, 0.95]");
    if (train.empty()) throw ValidationError("inject_outliers needs a non-empty train");
    if (fraction == 0.0) return train;

    const auto& src = train.pulses();
    const double n = static_cast<double>(src.size());
    const auto count = static_cast<std::size_t>(std::ceil(fraction * n / (1.0 - fraction) - 1e-9));

    double fmin = src[0].freq, fmax = src[0].freq, lmin = src[0].level;
    double pw_sum = 0.0, level_sum = 0.0;
    for (const auto& p : src) {
        fmin = std::min(fmin, p.freq);
        fmax = std::max(fmax, p.freq);
        lmin = std::min(lmin, p.level);
        pw_sum += p.pw;
        level_sum += p.level;
    }
    const double tmin = src.front().toa, tmax = src.back().toa;
    const double pw_mean = pw_sum / n, level_mean = level_sum / n;
    const bool shift_level = !(level_mean > 0.0);
    const double level_scale = shift_level ? level_mean - lmin : level_mean;

    auto rng = make_rng(seed, 0, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> pw_exp(1.0 / pw_mean);
    std::exponential_distribution<double> level_exp(level_scale > 0.0 ? 1.0 / level_scale : 1.0);

    std::vector<Pulse> pulses = src;
    std::vector<int> truth;
    if (train.has_truth()) truth = *train.truth();
    pulses.reserve(src.size() + count);
    for (std::size_t i = 0; i < count; ++i) {
        Pulse p;
        p.toa = tmin + unit(rng) * (tmax - tmin);
        p.freq = fmin + unit(rng) * (fmax - fmin);
        p.pw = std::max(pw_exp(rng), 1e-6);
        const double l = level_scale > 0.0 ? level_exp(rng) : 0.0;
        p.level = shift_level ? lmin + l : l;
        pulses.push_back(p);
        if (train.has_truth()) truth.push_back(kOutlier);
    }
    if (train.has_truth()) return PulseTrain(std::move(pulses), std::move(truth));
    return PulseTrain(std::move(pulses));
}

ScenarioConfig scale_noise(const ScenarioConfig& cfg, double coefficient) {
    if (!(coefficient >= 1.0) || !std::isfinite(coefficient)) throw ValidationError("noise coefficient must be >= 1");
    ScenarioConfig out = cfg;
    out.noise.noise_coefficient = coefficient;
    return out;
}

ScenarioConfig table_scenario(std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.duration = 1.35e6;
    cfg.detection_threshold_db = 0.0;
    cfg.noise = NoiseModel{2.14, 1e-3, 2.55, 1.0, 1.0, 0.1};

    EmitterProfile e0;
    e0.frequencies = {1025, 1050, 1075, 1100};
    e0.pws = {15.3};
    e0.pris = {70, 110};
    e0.power_db = 25.0;
    e0.scan_period = 400'000;
    e0.scan_offset = 0;
    e0.lobe_width = 0.25;
    e0.switch_period = 250;

    EmitterProfile e1;
    e1.frequencies = {825, 884};
    e1.pws = {15.2};
    e1.pris = {85, 86, 87, 88, 89, 90, 91, 92, 93, 94, 104, 106, 108, 110};
    e1.power_db = 22.0;
    e1.scan_period = 550'000;
    e1.scan_offset = 150'000;
    e1.lobe_width = 0.25;
    e1.switch_period = 250;

    EmitterProfile e2;
    e2.frequencies = {860};
    e2.pws = {15.3};
    e2.pris = {95, 96, 97, 98, 99, 100};
    e2.power_db = 28.0;
    e2.scan_period = 700'000;
    e2.scan_offset = 330'000;
    e2.lobe_width = 0.25;
    e2.switch_period = 250;

    cfg.emitters = {e0, e1, e2};
    return cfg;
}

ScenarioConfig overlap_scenario(std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.duration = 1.2e6;
    cfg.detection_threshold_db = 0.0;
    cfg.noise = NoiseModel{2.14, 1e-3, 2.55, 1.0, 4.0, 0.1};

    // tracking radar: no scan, always above threshold
    EmitterProfile low;
    low.frequencies = {800};
    low.pws = {10.0};
    low.pris = {100, 120};
    low.power_db = 20.0;
    low.lobe_depth_db = 0.0;
    low.switch_period = 3'000;

    EmitterProfile a;
    a.frequencies = {980, 1040};
    a.pws = {15.3};
    a.pris = {80, 90};
    a.power_db = 25.0;
    a.scan_period = 400'000;
    a.scan_offset = 0;
    a.lobe_width = 0.2;
    a.switch_period = 1'000;

    EmitterProfile b = a;
    b.frequencies = {1010, 1070};
    b.pris = {85, 95};
    b.scan_offset = 200'000;

    cfg.emitters = {low, a, b};
    return cfg;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

template <class T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

EmitterProfile emitter_from_json(const json& j) {
    EmitterProfile e;
    e.frequencies = j.at("frequencies_mhz").get<std::vector<double>>();
    e.pws = j.at("pws_ns").get<std::vector<double>>();
    e.pris = j.at("pris_us").get<std::vector<double>>();
    read_opt(j, "power_db", e.power_db);
    read_opt(j, "scan_period_us", e.scan_period);
    read_opt(j, "scan_offset_us", e.scan_offset);
    read_opt(j, "lobe_width", e.lobe_width);
    read_opt(j, "lobe_shoulder", e.lobe_shoulder);
    read_opt(j, "lobe_depth_db", e.lobe_depth_db);
    read_opt(j, "switch_period_us", e.switch_period);
    return e;
}

json emitter_to_json(const EmitterProfile& e) {
    return json{{"frequencies_mhz", e.frequencies}, {"pws_ns", e.pws},
                {"pris_us", e.pris},                {"power_db", e.power_db},
                {"scan_period_us", e.scan_period},  {"scan_offset_us", e.scan_offset},
                {"lobe_width", e.lobe_width},       {"lobe_shoulder", e.lobe_shoulder},
                {"lobe_depth_db", e.lobe_depth_db}, {"switch_period_us", e.switch_period}};
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
    ScenarioConfig cfg;
    try {
        const json j = json::parse(json_text);
        read_opt(j, "duration_us", cfg.duration);
        if (j.contains("detection_threshold_db") && !j.at("detection_threshold_db").is_null())
            cfg.detection_threshold_db = j.at("detection_threshold_db").get<double>();
        read_opt(j, "split_margin_db", cfg.split_margin_db);
        read_opt(j, "outlier_fraction", cfg.outlier_fraction);
        read_opt(j, "seed", cfg.seed);
        if (j.contains("noise")) {
            const auto& n = j.at("noise");
            read_opt(n, "freq_std_mhz", cfg.noise.freq_std);
            read_opt(n, "pw_std_ns", cfg.noise.pw_std);
            read_opt(n, "toa_std_us", cfg.noise.toa_std);
            read_opt(n, "level_std_db", cfg.noise.level_std);
            read_opt(n, "noise_coefficient", cfg.noise.noise_coefficient);
            read_opt(n, "pw_resolution_ns", cfg.noise.pw_resolution);
        }
        for (const auto& e : j.at("emitters")) cfg.emitters.push_back(emitter_from_json(e));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid scenario: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
    json j;
    j["duration_us"] = cfg.duration;
    if (std::isfinite(cfg.detection_threshold_db)) j["detection_threshold_db"] = cfg.detection_threshold_db;
    else j["detection_threshold_db"] = nullptr;
    j["split_margin_db"] = cfg.split_margin_db;
    j["outlier_fraction"] = cfg.outlier_fraction;
    j["seed"] = cfg.seed;
    j["noise"] = {{"freq_std_mhz", cfg.noise.freq_std},
                  {"pw_std_ns", cfg.noise.pw_std},
                  {"toa_std_us", cfg.noise.toa_std},
                  {"level_std_db", cfg.noise.level_std},
                  {"noise_coefficient", cfg.noise.noise_coefficient},
                  {"pw_resolution_ns", cfg.noise.pw_resolution}};
    j["emitters"] = json::array();
    for (const auto& e : cfg.emitters) j["emitters"].push_back(emitter_to_json(e));
    return j.dump(2);
}

}  // namespace deint::sim
