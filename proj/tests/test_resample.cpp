#include <random>

#include "doctest.h"
#include "coeye/errors.hpp"
#include "coeye/resample.hpp"
#include "fixtures.hpp"

using namespace coeye;

namespace {

// True when s lies on the segment between a and b, coordinate-wise.
bool on_segment(const std::vector<double>& s, const std::vector<double>& a,
                const std::vector<double>& b) {
    double t = -1;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double d = b[i] - a[i];
        if (std::abs(d) < 1e-12) {
            if (std::abs(s[i] - a[i]) > 1e-9) return false;
            continue;
        }
        double ti = (s[i] - a[i]) / d;
        if (ti < -1e-9 || ti > 1 + 1e-9) return false;
        if (t < 0) t = ti;
        else if (std::abs(ti - t) > 1e-7) return false;
    }
    return true;
}

bool convex_of_class(const TimeSeries& s, const Dataset& original) {
    for (std::size_t i = 0; i < original.size(); ++i) {
        if (original[i].label != s.label) continue;
        for (std::size_t j = i; j < original.size(); ++j) {
            if (original[j].label != s.label) continue;
            if (on_segment(s.values, original[i].values, original[j].values)) return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("balanced input is unchanged") {
    auto ds = fixtures::blobs({10, 10}, 6, 1);
    auto res = smote(ds);
    CHECK(res.data.size() == 20);
    CHECK(res.report.smote_percentage == 0.0);
    CHECK(res.report.total_added() == 0);
}

TEST_CASE("ten versus four") {
    auto ds = fixtures::blobs({10, 4}, 6, 2);
    auto res = smote(ds, 5, 7);
    auto counts = class_counts(res.data);
    CHECK(counts[0] == 10);
    CHECK(counts[1] == 10);
    CHECK(res.report.added_counts[1] == 6);
    CHECK(res.report.smote_percentage == doctest::Approx(6.0 / 14.0).epsilon(1e-12));
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(res.data[i].values == ds[i].values);
    for (std::size_t i = ds.size(); i < res.data.size(); ++i) CHECK(convex_of_class(res.data[i], ds));
}

TEST_CASE("two minority points interpolate along the diagonal") {
    std::vector<TimeSeries> rows;
    for (int i = 0; i < 6; ++i) rows.push_back({{5.0 + i, 9.0 - i}, 0});
    rows.push_back({{0.0, 0.0}, 1});
    rows.push_back({{1.0, 1.0}, 1});
    auto res = smote(Dataset("d", rows), 1, 3);
    REQUIRE(res.data.size() == 12);
    for (std::size_t i = 8; i < 12; ++i) {
        const auto& v = res.data[i].values;
        CHECK(*res.data[i].label == 1);
        CHECK(v[0] == doctest::Approx(v[1]));
        CHECK(v[0] >= 0.0);
        CHECK(v[0] <= 1.0);
    }
}

TEST_CASE("random imbalanced fixtures balance exactly") {
    std::mt19937_64 rng(50);
    std::uniform_int_distribution<int> classes(2, 5), size(1, 25), len(2, 12);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::size_t> sizes(classes(rng));
        for (auto& s : sizes) s = size(rng);
        sizes[0] = 25;
        auto ds = fixtures::blobs(sizes, len(rng), trial);
        auto res = smote(ds, 5, trial);
        auto counts = class_counts(res.data);
        std::size_t added = 0;
        for (std::size_t c = 0; c < sizes.size(); ++c) {
            int label = static_cast<int>(c);
            if (sizes[c] >= 2) CHECK(counts[label] == 25);
            else CHECK(counts[label] == sizes[c]);
            added += counts[label] - sizes[c];
        }
        CHECK(res.report.total_added() == added);
        CHECK(res.report.smote_percentage == doctest::Approx(double(added) / ds.size()));
        for (std::size_t i = 0; i < ds.size(); ++i) CHECK(res.data[i].values == ds[i].values);
        for (std::size_t i = ds.size(); i < res.data.size(); ++i) CHECK(convex_of_class(res.data[i], ds));
    }
}

TEST_CASE("seeded and deterministic") {
    auto ds = fixtures::blobs({12, 3, 5}, 5, 9);
    auto a = smote(ds, 5, 1), b = smote(ds, 5, 1);
    REQUIRE(a.data.size() == b.data.size());
    for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i].values == b.data[i].values);
}

TEST_CASE("single class is rejected") {
    auto ds = fixtures::blobs({8}, 4, 1);
    CHECK_THROWS_AS(smote(ds), NoMinorityClass);
}
