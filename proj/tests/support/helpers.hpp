#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "deint/pdw.hpp"

namespace testutil {

inline std::filesystem::path temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "deint_unit";
    std::filesystem::create_directories(dir);
    return dir / name;
}

inline std::vector<double> normal_sample(std::mt19937_64& rng, std::size_t n, double mu = 0.0, double sd = 1.0) {
    std::normal_distribution<double> d(mu, sd);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

inline std::vector<double> uniform_sample(std::mt19937_64& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

// 2-column matrix from point list
inline deint::FeatureMatrix matrix2(const std::vector<double>& x, const std::vector<double>& y) {
    return deint::FeatureMatrix({"x", "y"}, {x, y});
}

}  // namespace testutil
