#include "coeye/eval.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "coeye/errors.hpp"

#ifndef COEYE_VERSION
#define COEYE_VERSION "unknown"
#endif

namespace coeye {

const char* build_version() { return COEYE_VERSION; }

ClassificationMetrics metrics(std::span<const int> y_true, std::span<const int> y_pred,
                              std::span<const int> classes) {
    if (y_true.size() != y_pred.size() || y_true.empty()) {
        throw FeatureMismatch("metrics need equal, non-empty label vectors");
    }
    ClassificationMetrics m;
    m.classes.assign(classes.begin(), classes.end());
    const std::size_t c = classes.size();
    auto index_of = [&](int label) {
        auto it = std::find(classes.begin(), classes.end(), label);
        if (it == classes.end()) throw UnknownLabel("label " + std::to_string(label));
        return static_cast<std::size_t>(it - classes.begin());
    };
    m.confusion.assign(c, std::vector<std::size_t>(c, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        auto t = index_of(y_true[i]);
        auto p = index_of(y_pred[i]);
        ++m.confusion[t][p];
        if (t == p) ++correct;
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());
    m.precision.resize(c);
    m.recall.resize(c);
    m.f1.resize(c);
    std::size_t tp_sum = 0, fp_sum = 0, fn_sum = 0;
    for (std::size_t k = 0; k < c; ++k) {
        std::size_t tp = m.confusion[k][k], fp = 0, fn = 0;
        for (std::size_t j = 0; j < c; ++j) {
            if (j == k) continue;
            fp += m.confusion[j][k];
            fn += m.confusion[k][j];
        }
        tp_sum += tp;
        fp_sum += fp;
        fn_sum += fn;
        m.precision[k] = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        m.recall[k] = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        double s = m.precision[k] + m.recall[k];
        m.f1[k] = s == 0.0 ? 0.0 : 2.0 * m.precision[k] * m.recall[k] / s;
        m.macro_precision += m.precision[k];
        m.macro_recall += m.recall[k];
        m.macro_f1 += m.f1[k];
    }
    m.macro_precision /= static_cast<double>(c);
    m.macro_recall /= static_cast<double>(c);
    m.macro_f1 /= static_cast<double>(c);
    double denom = 2.0 * tp_sum + fp_sum + fn_sum;
    m.micro_f1 = denom == 0.0 ? 0.0 : 2.0 * tp_sum / denom;
    return m;
}

int nn1_euclidean(const Dataset& train, const TimeSeries& ts) {
    if (train.empty()) throw EmptyTrainingSet("1-NN on an empty training set");
    if (ts.values.size() != train.length()) {
        throw SeriesLengthMismatch("series has length " + std::to_string(ts.values.size()) +
                                   ", training series have " + std::to_string(train.length()));
    }
    double best = std::numeric_limits<double>::infinity();
    int label = 0;
    for (const auto& s : train.series()) {
        double d = 0.0;
        for (std::size_t t = 0; t < ts.values.size() && d < best; ++t) {
            double diff = s.values[t] - ts.values[t];
            d += diff * diff;
        }
        if (d < best) {
            best = d;
            label = s.label.value_or(0);
        }
    }
    return label;
}

const char* to_string(BenchmarkMode mode) {
    switch (mode) {
        case BenchmarkMode::CoEye: return "coeye";
        case BenchmarkMode::SaxOnly: return "sax_only";
        case BenchmarkMode::SfaOnly: return "sfa_only";
        case BenchmarkMode::RandomLenses: return "random_lenses";
        case BenchmarkMode::Ed1nn: return "ed1nn";
    }
    return "?";
}

BenchmarkMode parse_benchmark_mode(const std::string& text) {
    for (auto m : {BenchmarkMode::CoEye, BenchmarkMode::SaxOnly, BenchmarkMode::SfaOnly,
                   BenchmarkMode::RandomLenses, BenchmarkMode::Ed1nn}) {
        if (text == to_string(m)) return m;
    }
    throw InvalidArgument("unknown benchmark mode '" + text + "'");
}

std::string benchmark_csv_header() {
    return "dataset,mode,seed,accuracy,macro_precision,macro_recall,macro_f1,micro_f1,"
           "n_sax_lenses,n_sfa_lenses,smote_pct,t_search_sax_s,t_search_sfa_s,t_train_s,"
           "t_predict_s,t_total_s,status,version";
}

std::string benchmark_csv_row(const EvalReport& r) {
    std::ostringstream os;
    os << std::setprecision(6) << std::fixed;
    const auto& s = r.scores;
    os << r.dataset << ',' << to_string(r.mode) << ',' << r.seed << ',' << s.accuracy << ','
       << s.macro_precision << ',' << s.macro_recall << ',' << s.macro_f1 << ',' << s.micro_f1
       << ',' << r.n_sax_lenses << ',' << r.n_sfa_lenses << ',' << r.smote_pct << ','
       << r.t_search_sax << ',' << r.t_search_sfa << ',' << r.t_train << ',' << r.t_predict << ','
       << r.t_total << ',' << r.status << ',' << build_version();
    return os.str();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

class CsvSink {
public:
    explicit CsvSink(const std::filesystem::path& path) {
        if (path.empty()) return;
        bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
        out_.open(path, std::ios::app);
        if (!out_) throw IoError("cannot write " + path.string());
        if (fresh) out_ << benchmark_csv_header() << '\n';
    }
    void write(const EvalReport& r) {
        if (!out_.is_open()) return;
        out_ << benchmark_csv_row(r) << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
};

VoteScope scope_for(BenchmarkMode mode) {
    switch (mode) {
        case BenchmarkMode::SaxOnly: return VoteScope::SaxOnly;
        case BenchmarkMode::SfaOnly: return VoteScope::SfaOnly;
        default: return VoteScope::Both;
    }
}

}  // namespace

std::vector<EvalReport> run_benchmark(const BenchmarkOptions& options) {
    CsvSink sink(options.out);
    std::vector<EvalReport> reports;
    auto log = [&](const std::string& line) {
        if (options.log) *options.log << line << std::endl;
    };

    for (const auto& name : options.datasets) {
        std::optional<Dataset> train, test;
        std::string load_error;
        try {
            auto train_path = find_split_file(options.data_dir, name, "TRAIN");
            auto test_path = find_split_file(options.data_dir, name, "TEST");
            if (!train_path || !test_path) throw IoError("missing TRAIN/TEST files for " + name);
            train = load_ucr(*train_path);
            test = load_ucr(*test_path);
            if (train->length() != test->length()) {
                throw SeriesLengthMismatch("TRAIN and TEST lengths differ for " + name);
            }
        } catch (const std::exception& e) {
            load_error = e.what();
        }

        for (auto seed : options.seeds) {
            std::optional<CoEyeModel> searched;
            TrainStats searched_stats;
            double searched_wall = 0.0;

            for (auto mode : options.modes) {
                EvalReport r;
                r.dataset = name;
                r.mode = mode;
                r.seed = seed;
                if (!load_error.empty()) {
                    r.status = "error";
                    log(name + " [" + to_string(mode) + "] error: " + load_error);
                    sink.write(r);
                    reports.push_back(r);
                    continue;
                }
                try {
                    auto start = Clock::now();
                    std::vector<int> truth = test->labels();
                    std::vector<int> predicted(test->size());
                    std::vector<int> classes = train->class_labels();
                    for (int label : test->class_labels()) {
                        if (!std::binary_search(classes.begin(), classes.end(), label)) {
                            classes.insert(std::upper_bound(classes.begin(), classes.end(), label), label);
                        }
                    }
                    if (mode == BenchmarkMode::Ed1nn) {
                        auto tp = Clock::now();
                        for (std::size_t i = 0; i < test->size(); ++i) {
                            predicted[i] = nn1_euclidean(*train, (*test)[i]);
                        }
                        r.t_predict = seconds_since(tp);
                        r.t_total = seconds_since(start);
                    } else {
                        TrainConfig config = options.config;
                        config.seed = seed;
                        const CoEyeModel* model = nullptr;
                        CoEyeModel random_model;
                        TrainStats stats;
                        double train_wall = 0.0;
                        double trained_here = 0.0;
                        if (mode == BenchmarkMode::RandomLenses) {
                            config.strategy = LensStrategy::Random;
                            auto t = Clock::now();
                            random_model = coeye::train(*train, config, &stats);
                            train_wall = seconds_since(t);
                            trained_here = train_wall;
                            model = &random_model;
                        } else {
                            config.strategy = LensStrategy::Search;
                            if (!searched) {
                                auto t = Clock::now();
                                searched = coeye::train(*train, config, &searched_stats);
                                searched_wall = seconds_since(t);
                                trained_here = searched_wall;
                            }
                            stats = searched_stats;
                            train_wall = searched_wall;
                            model = &*searched;
                        }
                        auto tp = Clock::now();
                        ClassifyOptions co{scope_for(mode), false};
                        for (std::size_t i = 0; i < test->size(); ++i) {
                            predicted[i] = classify(*model, (*test)[i], co).label;
                        }
                        r.t_predict = seconds_since(tp);
                        r.t_search_sax = stats.t_search_sax;
                        r.t_search_sfa = stats.t_search_sfa;
                        r.t_train = stats.t_train;
                        // the shared model's wall time is charged to every mode that uses it
                        r.t_total = seconds_since(start) - trained_here + train_wall;
                        r.n_sax_lenses = model->sax_count();
                        r.n_sfa_lenses = model->sfa_count();
                        r.smote_pct = stats.smote.smote_percentage;
                    }
                    r.scores = metrics(truth, predicted, classes);
                    std::ostringstream msg;
                    msg << name << " [" << to_string(mode) << ", seed " << seed
                        << "] accuracy " << std::setprecision(4) << r.scores.accuracy << " ("
                        << r.n_sax_lenses << " SAX / " << r.n_sfa_lenses << " SFA eyes, "
                        << std::setprecision(3) << r.t_total << " s)";
                    log(msg.str());
                } catch (const std::exception& e) {
                    r.status = "error";
                    log(name + " [" + to_string(mode) + "] error: " + e.what());
                }
                sink.write(r);
                reports.push_back(r);
            }
        }
    }
    return reports;
}

}  // namespace coeye
