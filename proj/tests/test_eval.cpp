#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "coeye/errors.hpp"
#include "coeye/eval.hpp"
#include "fixtures.hpp"

using namespace coeye;

namespace {

double f1_direct(std::span<const int> t, std::span<const int> p, int c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        tp += t[i] == c && p[i] == c;
        fp += t[i] != c && p[i] == c;
        fn += t[i] == c && p[i] != c;
    }
    return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
    return out;
}

}  // namespace

TEST_CASE("perfect predictions") {
    std::vector<int> y{1, 2, 2, 3};
    auto m = metrics(y, y, std::vector<int>{1, 2, 3});
    CHECK(m.accuracy == 1.0);
    CHECK(m.macro_f1 == 1.0);
    CHECK(m.micro_f1 == 1.0);
}

TEST_CASE("hand-counted confusion") {
    std::vector<int> t{0, 0, 1, 1}, p{0, 1, 1, 1};
    auto m = metrics(t, p, std::vector<int>{0, 1});
    CHECK(m.accuracy == 0.75);
    CHECK(m.precision[0] == 1.0);
    CHECK(m.recall[0] == 0.5);
    CHECK(m.precision[1] == doctest::Approx(2.0 / 3.0));
    CHECK(m.recall[1] == 1.0);
    CHECK(m.macro_f1 == doctest::Approx((2.0 / 3.0 + 0.8) / 2).epsilon(1e-12));
    CHECK(m.confusion[0][1] == 1);
}

TEST_CASE("single predicted class") {
    std::vector<int> t{0, 1, 0, 1}, p{1, 1, 1, 1};
    auto m = metrics(t, p, std::vector<int>{0, 1});
    CHECK(m.recall[1] == 1.0);
    CHECK(m.recall[0] == 0.0);
    CHECK(m.precision[0] == 0.0);
    CHECK(m.f1[0] == 0.0);
}

TEST_CASE("metrics properties") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> cls(0, 3), len(1, 60);
    std::vector<int> classes{0, 1, 2, 3};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> t(len(rng)), p(t.size());
        for (auto& v : t) v = cls(rng);
        for (auto& v : p) v = cls(rng);
        auto m = metrics(t, p, classes);
        double hits = 0, trace = 0, total = 0, macro = 0;
        for (std::size_t i = 0; i < t.size(); ++i) hits += t[i] == p[i];
        for (int c = 0; c < 4; ++c) {
            std::size_t row = 0;
            for (auto v : m.confusion[c]) row += v, total += v;
            trace += m.confusion[c][c];
            CHECK(row == static_cast<std::size_t>(std::count(t.begin(), t.end(), c)));
            double f = f1_direct(t, p, c);
            CHECK(m.f1[c] == doctest::Approx(f).epsilon(1e-12));
            macro += f;
        }
        CHECK(m.accuracy == doctest::Approx(hits / t.size()));
        CHECK(m.accuracy == doctest::Approx(trace / total));
        CHECK(m.macro_f1 == doctest::Approx(macro / 4).epsilon(1e-12));
        CHECK(m.macro_f1 >= 0.0);
        CHECK(m.macro_f1 <= 1.0);
    }
    std::vector<int> bad{5};
    CHECK_THROWS_AS(metrics(bad, bad, classes), UnknownLabel);
}

TEST_CASE("nearest neighbour") {
    Dataset train("t", {{{0, 0}, 1}, {{2, 0}, 2}, {{0, 2}, 3}});
    CHECK(nn1_euclidean(train, {{2, 0}, {}}) == 2);
    CHECK(nn1_euclidean(train, {{1, 0}, {}}) == 1);
    CHECK(nn1_euclidean(train, {{1, 1}, {}}) == 1);
    CHECK_THROWS_AS(nn1_euclidean(train, {{1, 1, 1}, {}}), SeriesLengthMismatch);

    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> v(-3, 3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<TimeSeries> rows;
        for (int r = 0; r < 15; ++r) {
            TimeSeries ts{{}, r};
            for (int t = 0; t < 4; ++t) ts.values.push_back(v(rng));
            rows.push_back(ts);
        }
        Dataset ds("r", rows);
        TimeSeries probe;
        for (int t = 0; t < 4; ++t) probe.values.push_back(v(rng));
        long best = -1, best_d = 0;
        for (std::size_t r = 0; r < ds.size(); ++r) {
            long d = 0;
            for (int t = 0; t < 4; ++t) d += long((ds[r].values[t] - probe.values[t]) * (ds[r].values[t] - probe.values[t]));
            if (best < 0 || d < best_d) best = r, best_d = d;
        }
        CHECK(nn1_euclidean(ds, probe) == *ds[best].label);
    }
}

TEST_CASE("benchmark csv") {
    auto dir = std::filesystem::temp_directory_path() / "coeye_bench";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    write_ucr(fixtures::waves(5, 32, 1), dir / "WavesA_TRAIN.tsv");
    write_ucr(fixtures::waves(4, 32, 2), dir / "WavesA_TEST.tsv");

    BenchmarkOptions opt;
    opt.data_dir = dir;
    opt.datasets = {"WavesA", "Missing"};
    opt.modes = {BenchmarkMode::CoEye, BenchmarkMode::SaxOnly, BenchmarkMode::SfaOnly,
                 BenchmarkMode::RandomLenses, BenchmarkMode::Ed1nn};
    opt.seeds = {1, 2};
    opt.config.trees = 10;
    opt.config.threads = 1;
    opt.config.grid.sax_alphas = {3, 4};
    opt.config.grid.sfa_alphas = {3, 4};
    opt.config.grid.sfa_word_lengths = {4, 8};
    opt.out = dir / "out.csv";
    auto reports = run_benchmark(opt);

    auto lines = read_lines(opt.out);
    REQUIRE(lines.size() == reports.size() + 1);
    CHECK(lines[0] == benchmark_csv_header());
    CHECK(lines[0].rfind("dataset,mode,seed,accuracy,macro_precision,macro_recall,macro_f1,micro_f1,"
                         "n_sax_lenses,n_sfa_lenses,smote_pct,t_search_sax_s,t_search_sfa_s,t_train_s,"
                         "t_predict_s,t_total_s,status", 0) == 0);
    std::size_t errors = 0;
    for (const auto& r : reports) {
        if (r.status != "ok") {
            ++errors;
            CHECK(r.dataset == "Missing");
            continue;
        }
        double parts = r.t_search_sax + r.t_search_sfa + r.t_train + r.t_predict;
        CHECK(r.t_total >= parts * 0.95);
        CHECK(r.scores.accuracy >= 0.0);
        CHECK(r.scores.accuracy <= 1.0);
    }
    // one error row per (mode, seed) for the missing dataset
    CHECK(errors == 10);
    CHECK(reports.size() == 20);
    for (const auto& line : lines) CHECK(split(line).size() == split(lines[0]).size());

    // Appending keeps a single header and identical non-timing columns.
    auto again = run_benchmark(opt);
    auto lines2 = read_lines(opt.out);
    REQUIRE(lines2.size() == 2 * reports.size() + 1);
    auto strip = [](const std::string& line) {
        auto cells = split(line);
        std::string out;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (i < 11 || i > 15) out += cells[i] + ",";
        return out;
    };
    for (std::size_t i = 0; i < reports.size(); ++i) CHECK(strip(lines2[1 + i]) == strip(lines2[1 + reports.size() + i]));
    std::filesystem::remove_all(dir);
}

TEST_CASE("benchmark modes parse") {
    CHECK(parse_benchmark_mode("sax_only") == BenchmarkMode::SaxOnly);
    CHECK(parse_benchmark_mode("ed1nn") == BenchmarkMode::Ed1nn);
    CHECK_THROWS_AS(parse_benchmark_mode("bogus"), InvalidArgument);
    CHECK(std::string(build_version()).size() > 0);
}
