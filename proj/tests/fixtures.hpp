#pragma once
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>
#include "coeye/data.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return COEYE_TEST_DATA_DIR; }

inline coeye::Dataset load(const std::string& name, const std::string& split) {
    return coeye::load_ucr(data_dir() / (name + "_" + split + ".tsv"));
}

// Noisy sine (label 0) versus noisy square wave (label 1).
inline coeye::Dataset waves(std::size_t per_class, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.2);
    std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
    std::vector<coeye::TimeSeries> rows;
    for (int label = 0; label < 2; ++label) {
        for (std::size_t r = 0; r < per_class; ++r) {
            double p = phase(rng);
            coeye::TimeSeries ts;
            ts.label = label;
            for (std::size_t t = 0; t < n; ++t) {
                double s = std::sin(6.283185307179586 * 3.0 * t / n + p);
                ts.values.push_back((label == 0 ? s : (s > 0 ? 1.0 : -1.0)) + noise(rng));
            }
            rows.push_back(std::move(ts));
        }
    }
    return coeye::Dataset("waves", std::move(rows));
}

// Gaussian blobs with class-dependent mean, arbitrary class sizes.
inline coeye::Dataset blobs(const std::vector<std::size_t>& sizes, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<coeye::TimeSeries> rows;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        for (std::size_t r = 0; r < sizes[c]; ++r) {
            coeye::TimeSeries ts;
            ts.label = static_cast<int>(c);
            for (std::size_t t = 0; t < n; ++t) ts.values.push_back(2.0 * c + noise(rng));
            rows.push_back(std::move(ts));
        }
    }
    return coeye::Dataset("blobs", std::move(rows));
}

}  // namespace fixtures
