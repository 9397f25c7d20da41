// deint: simulate, deinterleave, run the PRI baselines, evaluate, sweep.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deint/baselines.hpp"
#include "deint/error.hpp"
#include "deint/hacot.hpp"
#include "deint/ihacot.hpp"
#include "deint/metrics.hpp"
#include "deint/simulator.hpp"
#include "deint/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace deint;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::string out_dir = ".";
};

fs::path under(const Globals& g, const std::string& p) {
    const fs::path path(p);
    if (path.is_absolute() || g.out_dir.empty()) return path;
    fs::create_directories(g.out_dir);
    return fs::path(g.out_dir) / path;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write " + path.string());
    f << text;
}

stats::TestKind parse_test(const std::string& s) {
    if (s == "ks") return stats::TestKind::KolmogorovSmirnov;
    if (s == "student") return stats::TestKind::Student;
    throw ValidationError("unknown test '" + s + "' (ks|student)");
}

sim::ScenarioConfig pick_scenario(const std::string& file, const std::string& preset, std::uint64_t seed) {
    if (!file.empty() && !preset.empty()) throw ValidationError("give either --scenario or --preset");
    sim::ScenarioConfig cfg;
    if (!file.empty())
        cfg = sim::load_scenario(file);
    else if (preset.empty() || preset == "table")
        cfg = sim::table_scenario(seed);
    else if (preset == "overlap")
        cfg = sim::overlap_scenario(seed);
    else
        throw ValidationError("unknown preset '" + preset + "' (table|overlap)");
    cfg.seed = seed;
    return cfg;
}

json merges_json(const std::vector<hacot::MergeRecord>& merges) {
    json a = json::array();
    for (const auto& m : merges)
        a.push_back({{"left", m.left}, {"right", m.right}, {"node", m.node}, {"distance", m.distance},
                     {"p_value", m.p_value}, {"tested", m.tested}, {"accepted", m.accepted}});
    return a;
}

json hacot_json(const hacot::Report& r) {
    return {{"initial_clusters", r.initial_clusters}, {"significant_clusters", r.significant_clusters},
            {"excluded_clusters", r.excluded_clusters}, {"final_groups", r.final_groups},
            {"alpha", r.alpha}, {"merges", merges_json(r.merges)}};
}

json summary_json(const metrics::RunSummary& s) {
    return {{"ari", s.ari}, {"detected_emitters", s.detected_emitters}, {"outlier_fraction", s.outlier_fraction},
            {"injected_in_clusters", s.injected_in_clusters}};
}

std::vector<bool> injected_mask(const PulseTrain& train) {
    std::vector<bool> m;
    for (int t : *train.truth()) m.push_back(t < 0);
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radar pulse deinterleaving with optimal transport distances"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Base RNG seed");
    app.add_option("--threads", g.threads, "Worker threads (0: all cores)");
    app.add_option("--out-dir", g.out_dir, "Directory for relative output paths");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a labelled PDW CSV");
    std::string scen_file, preset, sim_out = "pulses.csv", save_scen;
    double sim_outliers = -1.0, sim_noise = 1.0;
    sim_cmd->add_option("--scenario", scen_file, "Scenario JSON")->check(CLI::ExistingFile);
    sim_cmd->add_option("--preset", preset, "table | overlap");
    sim_cmd->add_option("--out", sim_out, "Output CSV");
    sim_cmd->add_option("--outliers", sim_outliers, "Injected outlier fraction (overrides the scenario)");
    sim_cmd->add_option("--noise", sim_noise, "Noise coefficient applied on top of the scenario");
    sim_cmd->add_option("--save-scenario", save_scen, "Also write the resolved scenario as JSON");

    // deinterleave
    auto* dei_cmd = app.add_subcommand("deinterleave", "Label a PDW CSV with HACOT or IHACOT");
    std::string method = "hacot", dei_in, dei_out = "labels.csv", report_path, test = "ks", pre_test = "ks";
    std::optional<std::size_t> min_pts;
    std::size_t lambda = 100, temporal_min_pts = 25;
    std::optional<double> alpha, pre_alpha;
    dei_cmd->add_option("--method", method, "hacot | ihacot");
    dei_cmd->add_option("--in", dei_in, "Input PDW CSV")->required()->check(CLI::ExistingFile);
    dei_cmd->add_option("--out", dei_out, "Output CSV with a label column");
    dei_cmd->add_option("--report", report_path, "JSON report of the stages");
    dei_cmd->add_option("--min-pts", min_pts, "HDBSCAN minPts (default 100 for hacot, 25 for ihacot)");
    dei_cmd->add_option("--lambda", lambda, "Minimum size of a significant cluster");
    dei_cmd->add_option("--alpha", alpha, "Fix the pruning confidence level");
    dei_cmd->add_option("--test", test, "ks | student");
    dei_cmd->add_option("--pre-test", pre_test, "ihacot pre-aggregation test: ks | student");
    dei_cmd->add_option("--pre-alpha", pre_alpha, "Fix the pre-aggregation confidence level");
    dei_cmd->add_option("--temporal-min-pts", temporal_min_pts, "minPts of the temporal sub-clustering");

    // baseline
    auto* base_cmd = app.add_subcommand("baseline", "PRI histograms: CDIF, SDIF or PRI transform");
    std::string base_method = "cdif", base_in, base_out = "pri.csv";
    std::vector<double> range{10.0, 1000.0};
    double bin_width = 1.0, x = 0.5;
    int max_order = 4;
    base_cmd->add_option("--method", base_method, "cdif | sdif | pritransform");
    base_cmd->add_option("--in", base_in, "Input PDW CSV")->required()->check(CLI::ExistingFile);
    base_cmd->add_option("--range", range, "PRI search range lo,hi in us")->delimiter(',')->expected(2);
    base_cmd->add_option("--bin-width", bin_width, "Histogram bin width, us");
    base_cmd->add_option("--max-order", max_order, "Highest difference order (cdif, sdif)");
    base_cmd->add_option("--x", x, "Threshold coefficient (cdif, sdif; alpha term for pritransform)");
    base_cmd->add_option("--out", base_out, "Output CSV");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Score a labelled CSV against its emitter column");
    std::string eval_in, eval_out, mode = "class";
    eval_cmd->add_option("--in", eval_in, "CSV with emitter and label columns")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--out", eval_out, "JSON output (stdout when empty)");
    eval_cmd->add_option("--outlier-mode", mode, "class | exclude");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Robustness sweep over outlier rate or noise");
    std::string kind = "outliers", sweep_scen, sweep_preset, sweep_name;
    std::vector<double> grid;
    std::vector<std::string> methods{"hacot-ks", "ihacot-ks", "ihacot-mix"};
    std::size_t realizations = 50;
    sweep_cmd->add_option("--kind", kind, "outliers | noise");
    sweep_cmd->add_option("--grid", grid, "Comma-separated grid")->delimiter(',')->required();
    sweep_cmd->add_option("--realizations", realizations, "Signals per grid point");
    sweep_cmd->add_option("--methods", methods, "hacot-ks,ihacot-ks,ihacot-mix")->delimiter(',');
    sweep_cmd->add_option("--scenario", sweep_scen, "Scenario JSON")->check(CLI::ExistingFile);
    sweep_cmd->add_option("--preset", sweep_preset, "table | overlap");
    sweep_cmd->add_option("--name", sweep_name, "Output basename (default sweep_<kind>)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sim_cmd) {
            auto cfg = pick_scenario(scen_file, preset, g.seed);
            if (sim_noise != 1.0) cfg = sim::scale_noise(cfg, sim_noise);
            if (sim_outliers >= 0.0) cfg.outlier_fraction = sim_outliers;
            if (!save_scen.empty()) write_text(under(g, save_scen), sim::scenario_to_json(cfg));
            const auto train = sim::simulate_scenario(cfg);
            const auto path = under(g, sim_out);
            save_pulses(train, std::nullopt, path);
            std::printf("%zu pulses -> %s\n", train.size(), path.string().c_str());
        } else if (*dei_cmd) {
            const auto train = load_pulses(dei_in);
            json report;
            Labeling labels;
            if (method == "hacot") {
                hacot::HacotConfig cfg;
                if (min_pts) cfg.min_pts = *min_pts;
                cfg.lambda = lambda;
                cfg.alpha = alpha;
                cfg.test = parse_test(test);
                cfg.temporal_min_pts = temporal_min_pts;
                const auto r = hacot::run_hacot_report(train, cfg);
                labels = r.labels;
                report = hacot_json(r);
            } else if (method == "ihacot") {
                ihacot::IhacotConfig cfg;
                if (min_pts) cfg.min_pts = *min_pts;
                cfg.lambda = lambda;
                cfg.alpha = alpha;
                cfg.test = parse_test(test);
                cfg.pre_test = parse_test(pre_test);
                cfg.pre_alpha = pre_alpha;
                cfg.temporal_min_pts = temporal_min_pts;
                const auto r = ihacot::run_ihacot_report(train, cfg);
                labels = r.hacot.labels;
                report = hacot_json(r.hacot);
                report["clusters_3d"] = r.clusters_3d;
                report["pre_groups"] = r.pre_groups;
                report["pre_alpha"] = r.pre_alpha;
            } else {
                throw ValidationError("unknown method '" + method + "' (hacot|ihacot)");
            }
            report["method"] = method;
            report["pulses"] = train.size();
            report["clusters"] = labels.cluster_count();
            report["outliers"] = labels.outlier_count();
            if (train.has_truth())
                report["summary"] = summary_json(metrics::summarize_run(Labeling{*train.truth()}, labels, injected_mask(train)));
            const auto path = under(g, dei_out);
            save_pulses(train, labels, path);
            if (!report_path.empty()) write_text(under(g, report_path), report.dump(2));
            std::printf("%zu clusters, %zu outliers -> %s\n", labels.cluster_count(), labels.outlier_count(),
                        path.string().c_str());
        } else if (*base_cmd) {
            const auto toas = load_pulses(base_in).toas();
            const baselines::PriRange r{range.at(0), range.at(1)};
            std::ostringstream csv;
            csv.precision(17);
            std::vector<double> detected;
            if (base_method == "cdif" || base_method == "sdif") {
                baselines::DifOptions opt;
                opt.bin_width = bin_width;
                opt.max_order = max_order;
                opt.x = x;
                const auto res = base_method == "cdif" ? baselines::cdif(toas, r, opt) : baselines::sdif(toas, r, opt);
                csv << "order,bin_center_us,value,threshold\n";
                for (const auto& h : res.histograms)
                    for (std::size_t b = 0; b < h.bins(); ++b)
                        csv << h.order << ',' << h.bin_centers[b] << ',' << h.values[b] << ',' << h.thresholds[b] << '\n';
                detected = res.detected;
            } else if (base_method == "pritransform") {
                baselines::PriTransformOptions opt;
                opt.bins = static_cast<std::size_t>(std::ceil((r.hi - r.lo) / bin_width - 1e-9));
                opt.alpha = x;
                const auto res = baselines::pri_transform(toas, r, opt);
                csv << "bin_center_us,value,threshold,pairs\n";
                const auto& h = res.histogram;
                for (std::size_t b = 0; b < h.bins(); ++b)
                    csv << h.bin_centers[b] << ',' << h.values[b] << ',' << h.thresholds[b] << ',' << res.counts[b] << '\n';
                detected = res.detected;
            } else {
                throw ValidationError("unknown baseline '" + base_method + "' (cdif|sdif|pritransform)");
            }
            write_text(under(g, base_out), csv.str());
            std::printf("detected PRIs (us):");
            for (double d : detected) std::printf(" %.3f", d);
            std::printf("\n");
        } else if (*eval_cmd) {
            const auto loaded = load_labeled_pulses(eval_in);
            if (!loaded.train.has_truth()) throw ValidationError("eval needs an emitter column");
            if (!loaded.labels) throw ValidationError("eval needs a label column");
            metrics::OutlierMode om = metrics::OutlierMode::AsClass;
            if (mode == "exclude")
                om = metrics::OutlierMode::Exclude;
            else if (mode != "class")
                throw ValidationError("unknown outlier mode '" + mode + "' (class|exclude)");
            const auto s = metrics::summarize_run(Labeling{*loaded.train.truth()}, *loaded.labels,
                                                  injected_mask(loaded.train), om);
            const std::string text = summary_json(s).dump(2);
            if (eval_out.empty())
                std::printf("%s\n", text.c_str());
            else
                write_text(under(g, eval_out), text);
        } else if (*sweep_cmd) {
            sweep::SweepSpec spec;
            spec.kind = sweep::parse_kind(kind);
            spec.grid = grid;
            spec.realizations = realizations;
            spec.methods.clear();
            for (const auto& m : methods) spec.methods.push_back(sweep::parse_method(m));
            spec.base = pick_scenario(sweep_scen, sweep_preset, g.seed);
            spec.base_seed = g.seed;
            spec.threads = g.threads;
            const auto t0 = std::chrono::steady_clock::now();
            const auto table = sweep::run_sweep(spec);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const std::string base = sweep_name.empty() ? "sweep_" + kind : sweep_name;
            sweep::write_csv(table, spec.kind, under(g, base + ".csv"));
            write_text(under(g, base + ".json"), sweep::manifest_json(spec, table));
            std::size_t failures = 0;
            for (const auto& c : table.cells) failures += c.failures;
            std::printf("%zu cells, %zu failed runs, %.1f s -> %s.csv\n", table.cells.size(), failures, secs,
                        under(g, base).string().c_str());
        }
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
