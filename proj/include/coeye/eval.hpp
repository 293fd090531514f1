#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "coeye/data.hpp"
#include "coeye/model.hpp"

namespace coeye {

struct ClassificationMetrics {
    std::vector<int> classes;
    // confusion[i][j]: true class i predicted as class j
    std::vector<std::vector<std::size_t>> confusion;
    double accuracy = 0.0;
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double micro_f1 = 0.0;
};

ClassificationMetrics metrics(std::span<const int> y_true, std::span<const int> y_pred,
                              std::span<const int> classes);

// Label of the nearest training series by squared Euclidean distance; ties
// go to the lowest training index.
int nn1_euclidean(const Dataset& train, const TimeSeries& ts);

enum class BenchmarkMode { CoEye, SaxOnly, SfaOnly, RandomLenses, Ed1nn };

const char* to_string(BenchmarkMode mode);
BenchmarkMode parse_benchmark_mode(const std::string& text);

struct EvalReport {
    std::string dataset;
    BenchmarkMode mode = BenchmarkMode::CoEye;
    std::uint64_t seed = 0;
    ClassificationMetrics scores;
    std::size_t n_sax_lenses = 0;
    std::size_t n_sfa_lenses = 0;
    double smote_pct = 0.0;
    double t_search_sax = 0.0;
    double t_search_sfa = 0.0;
    double t_train = 0.0;
    double t_predict = 0.0;
    double t_total = 0.0;
    std::string status = "ok";
};

struct BenchmarkOptions {
    std::filesystem::path data_dir;
    std::vector<std::string> datasets;
    std::vector<BenchmarkMode> modes = {BenchmarkMode::CoEye};
    std::vector<std::uint64_t> seeds = {42};
    // seed is overwritten per run
    TrainConfig config;
    // empty: no CSV written
    std::filesystem::path out;
    // progress lines; may be null
    std::ostream* log = nullptr;
};

// Trains on <name>_TRAIN and scores on <name>_TEST for every dataset, seed
// and mode. SAX-only, SFA-only and combined share one trained model per
// (dataset, seed). Rows are appended to `out` as they complete.
std::vector<EvalReport> run_benchmark(const BenchmarkOptions& options);

// Exact header line (no trailing newline) of the benchmark CSV.
std::string benchmark_csv_header();
std::string benchmark_csv_row(const EvalReport& report);

// Build identifier stored with every benchmark row.
const char* build_version();

}  // namespace coeye
