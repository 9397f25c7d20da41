#include "deint/pdw.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "deint/error.hpp"

namespace deint {

void validate(const Pulse& p) {
    if (!std::isfinite(p.toa)) throw ValidationError("pulse toa must be finite");
    if (!std::isfinite(p.level)) throw ValidationError("pulse level must be finite");
    if (!(p.freq > 0.0) || !std::isfinite(p.freq)) throw ValidationError("pulse freq must be positive");
    if (!(p.pw > 0.0) || !std::isfinite(p.pw)) throw ValidationError("pulse pw must be positive");
}

namespace {

std::vector<std::size_t> toa_order(const std::vector<Pulse>& pulses) {
    std::vector<std::size_t> order(pulses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pulses[a].toa < pulses[b].toa; });
    return order;
}

template <class T>
std::vector<T> permute(const std::vector<T>& v, const std::vector<std::size_t>& order) {
    std::vector<T> out;
    out.reserve(order.size());
    for (auto i : order) out.push_back(v[i]);
    return out;
}

}  // namespace

PulseTrain::PulseTrain(std::vector<Pulse> pulses, std::optional<std::vector<int>> truth) {
    if (truth && truth->size() != pulses.size())
        throw ValidationError("truth length " + std::to_string(truth->size()) + " != pulse count " +
                              std::to_string(pulses.size()));
    for (const auto& p : pulses) validate(p);
    const bool sorted = std::is_sorted(pulses.begin(), pulses.end(),
                                       [](const Pulse& a, const Pulse& b) { return a.toa < b.toa; });
    if (sorted) {
        pulses_ = std::move(pulses);
        truth_ = std::move(truth);
        return;
    }
    const auto order = toa_order(pulses);
    pulses_ = permute(pulses, order);
    if (truth) truth_ = permute(*truth, order);
}

std::vector<double> PulseTrain::toas() const {
    std::vector<double> out(pulses_.size());
    std::transform(pulses_.begin(), pulses_.end(), out.begin(), [](const Pulse& p) { return p.toa; });
    return out;
}

std::vector<double> PulseTrain::levels() const {
    std::vector<double> out(pulses_.size());
    std::transform(pulses_.begin(), pulses_.end(), out.begin(), [](const Pulse& p) { return p.level; });
    return out;
}

std::size_t Labeling::cluster_count() const {
    std::unordered_set<int> seen;
    for (int l : labels)
        if (l >= 0) seen.insert(l);
    return seen.size();
}

std::size_t Labeling::outlier_count() const {
    return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int l) { return l < 0; }));
}

Labeling canonicalize(const Labeling& in) {
    std::unordered_map<int, int> remap;
    Labeling out;
    out.labels.reserve(in.size());
    for (int l : in.labels) {
        if (l < 0) {
            out.labels.push_back(kOutlier);
            continue;
        }
        auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
        out.labels.push_back(it->second);
    }
    return out;
}

std::string_view feature_name(Feature f) {
    switch (f) {
        case Feature::Toa: return "toa";
        case Feature::Freq: return "freq";
        case Feature::Pw: return "pw";
        case Feature::Level: return "level";
    }
    return "?";
}

Feature parse_feature(std::string_view name) {
    if (name == "toa") return Feature::Toa;
    if (name == "freq") return Feature::Freq;
    if (name == "pw") return Feature::Pw;
    if (name == "level") return Feature::Level;
    throw ValidationError("unknown feature column '" + std::string(name) + "'");
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> names, std::vector<std::vector<double>> columns)
    : names_(std::move(names)), columns_(std::move(columns)) {
    if (names_.size() != columns_.size()) throw ValidationError("feature names/columns size mismatch");
    std::unordered_set<std::string> unique(names_.begin(), names_.end());
    if (unique.size() != names_.size()) throw ValidationError("feature column names must be unique");
    for (const auto& c : columns_) {
        if (c.size() != rows()) throw ValidationError("feature columns must have equal length");
        for (double v : c)
            if (std::isnan(v)) throw ValidationError("feature matrix contains NaN");
    }
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
    std::vector<std::vector<double>> cols(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        cols[c].reserve(rows.size());
        for (auto r : rows) cols[c].push_back(columns_[c][r]);
    }
    return FeatureMatrix(names_, std::move(cols));
}

FeatureMatrix feature_matrix(const PulseTrain& train, std::span<const Feature> columns) {
    if (columns.empty()) throw ValidationError("feature_matrix needs at least one column");
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (Feature f : columns) {
        names.emplace_back(feature_name(f));
        std::vector<double> col;
        col.reserve(train.size());
        for (const auto& p : train.pulses()) {
            switch (f) {
                case Feature::Toa: col.push_back(p.toa); break;
                case Feature::Freq: col.push_back(p.freq); break;
                case Feature::Pw: col.push_back(p.pw); break;
                case Feature::Level: col.push_back(p.level); break;
            }
        }
        cols.push_back(std::move(col));
    }
    return FeatureMatrix(std::move(names), std::move(cols));
}

FeatureMatrix feature_matrix(const PulseTrain& train, std::span<const std::string> columns) {
    std::vector<Feature> fs;
    fs.reserve(columns.size());
    for (const auto& c : columns) fs.push_back(parse_feature(c));
    return feature_matrix(train, fs);
}

FeatureMatrix quantile_normalize(const FeatureMatrix& features) {
    const std::size_t n = features.rows();
    if (n < 2) throw ValidationError("quantile_normalize needs at least 2 rows");
    std::vector<std::vector<double>> out(features.cols(), std::vector<double>(n));
    std::vector<std::size_t> order(n);
    const double denom = static_cast<double>(n - 1);
    for (std::size_t c = 0; c < features.cols(); ++c) {
        auto col = features.column(c);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
        if (col[order.front()] == col[order.back()]) {
            std::fill(out[c].begin(), out[c].end(), 0.5);
            continue;
        }
        // runs of equal values share the mean of their 0-based ranks
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i + 1;
            while (j < n && col[order[j]] == col[order[i]]) ++j;
            const double rank = 0.5 * static_cast<double>(i + j - 1);
            for (std::size_t k = i; k < j; ++k) out[c][order[k]] = rank / denom;
            i = j;
        }
    }
    return FeatureMatrix(features.names(), std::move(out));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    }
    return out;
}

double parse_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("invalid number '" + std::string(s) + "'", line);
    return v;
}

int parse_int(std::string_view s, std::size_t line) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("invalid integer '" + std::string(s) + "'", line);
    return v;
}

}  // namespace

LoadedPulses load_labeled_pulses(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());

    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty file, expected header", 1);
    ++lineno;
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split_csv(line);
    static const char* required[] = {"toa_us", "freq_mhz", "pw_ns", "level_db"};
    if (header.size() < 4) throw ParseError("header must start with toa_us,freq_mhz,pw_ns,level_db", lineno);
    for (int i = 0; i < 4; ++i)
        if (header[i] != required[i])
            throw ParseError("header column " + std::to_string(i) + " must be '" + required[i] + "'", lineno);
    int emitter_col = -1, label_col = -1;
    for (std::size_t i = 4; i < header.size(); ++i) {
        if (header[i] == "emitter" && emitter_col < 0) emitter_col = static_cast<int>(i);
        else if (header[i] == "label" && label_col < 0) label_col = static_cast<int>(i);
        else throw ParseError("unexpected header column '" + std::string(header[i]) + "'", lineno);
    }

    std::vector<Pulse> pulses;
    std::vector<int> truth, labels;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv(line);
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        Pulse p{parse_double(fields[0], lineno), parse_double(fields[1], lineno), parse_double(fields[2], lineno),
                parse_double(fields[3], lineno)};
        try {
            validate(p);
        } catch (const ValidationError& e) {
            throw ValidationError(std::string(e.what()) + " (line " + std::to_string(lineno) + ")");
        }
        pulses.push_back(p);
        if (emitter_col >= 0) truth.push_back(parse_int(fields[emitter_col], lineno));
        if (label_col >= 0) labels.push_back(parse_int(fields[label_col], lineno));
    }

    const auto order = toa_order(pulses);
    LoadedPulses out;
    std::optional<std::vector<int>> t;
    if (emitter_col >= 0) t = permute(truth, order);
    out.train = PulseTrain(permute(pulses, order), std::move(t));
    if (label_col >= 0) out.labels = Labeling{permute(labels, order)};
    return out;
}

PulseTrain load_pulses(const std::filesystem::path& path) { return load_labeled_pulses(path).train; }

void save_pulses(const PulseTrain& train, const std::optional<Labeling>& labels, const std::filesystem::path& path) {
    if (labels && labels->size() != train.size())
        throw ValidationError("label length " + std::to_string(labels->size()) + " != pulse count " +
                              std::to_string(train.size()));
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << "toa_us,freq_mhz,pw_ns,level_db";
    if (train.has_truth()) out << ",emitter";
    if (labels) out << ",label";
    out << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < train.size(); ++i) {
        const auto& p = train[i];
        out << p.toa << ',' << p.freq << ',' << p.pw << ',' << p.level;
        if (train.has_truth()) out << ',' << (*train.truth())[i];
        if (labels) out << ',' << (*labels)[i];
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace deint
