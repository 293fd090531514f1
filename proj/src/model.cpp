#include "coeye/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include "coeye/errors.hpp"
#include "coeye/parallel.hpp"

namespace coeye {

const char* to_string(LensStrategy s) { return s == LensStrategy::Search ? "search" : "random"; }

const char* to_string(VoteRound round) {
    switch (round) {
        case VoteRound::First: return "first";
        case VoteRound::Second: return "second";
        case VoteRound::Fallback: return "fallback";
    }
    return "?";
}

std::size_t CoEyeModel::sax_count() const {
    return static_cast<std::size_t>(std::count_if(eyes.begin(), eyes.end(), [](const Eye& e) {
        return e.lens.rep == Representation::Sax;
    }));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t lens_stream(const Lens& lens) {
    return 0xe7e5000000000000ULL ^ (static_cast<std::uint64_t>(lens.rep) << 40) ^
           (static_cast<std::uint64_t>(lens.drop_dc) << 32) ^
           (static_cast<std::uint64_t>(lens.alpha) << 16) ^ static_cast<std::uint64_t>(lens.w);
}

Eye fit_eye(const Dataset& data, const std::vector<int>& labels, const Lens& lens,
            const TrainConfig& config) {
    std::vector<std::vector<double>> values;
    values.reserve(data.size());
    for (const auto& s : data.series()) values.push_back(lens_values(s.values, lens));

    Eye eye{lens, fit_binning(lens, values, config.sax_mode), {}};
    SymbolMatrix X(values.size(), static_cast<std::size_t>(lens.w));
    for (std::size_t r = 0; r < values.size(); ++r) encode_values(values[r], eye.binning, X.row(r));
    ForestConfig fc{config.trees, derive_seed(config.seed, lens_stream(lens)), 1};
    eye.forest = fit_forest(X, labels, fc, data.class_labels());
    return eye;
}

}  // namespace

CoEyeModel train(const Dataset& train_raw, const TrainConfig& config, TrainStats* stats) {
    if (train_raw.size() < 2) throw EmptyTrainingSet("need at least two training series");
    if (train_raw.class_labels().size() < 2) throw NoMinorityClass("training set has a single class");

    TrainStats local;
    TrainStats& st = stats ? *stats : local;
    st = {};

    auto t0 = Clock::now();
    Dataset data = train_raw;
    {
        auto counts = class_counts(train_raw);
        st.smote.original_counts = counts;
        for (const auto& kv : counts) st.smote.added_counts[kv.first] = 0;
        if (config.smote) {
            auto result = smote(train_raw, config.smote_k, derive_seed(config.seed, 0x5307e));
            data = std::move(result.data);
            st.smote = std::move(result.report);
        }
    }
    double t_smote = seconds_since(t0);

    const LensGrid grid = config.grid.resolved(data.length());
    SearchConfig sc{config.trees, config.seed, config.threads, config.sax_mode};

    CoEyeModel model;
    model.dataset = train_raw.name();
    model.series_length = train_raw.length();
    model.class_labels = data.class_labels();
    model.config = config;

    std::vector<Lens> sax_lenses, sfa_lenses;
    if (config.strategy == LensStrategy::Search) {
        auto t = Clock::now();
        auto sfa = search_sfa_lenses(data, grid, sc);
        st.t_search_sfa = seconds_since(t);
        model.sfa_drop_dc = sfa.drop_dc;
        sfa_lenses = std::move(sfa.lenses);

        t = Clock::now();
        sax_lenses = search_lenses(data, Representation::Sax, grid, sc);
        st.t_search_sax = seconds_since(t);
    } else {
        auto budget = [&](Representation rep) { return (grid.size(rep) + 1) / 2; };
        auto t = Clock::now();
        sfa_lenses = search_lenses_random(data, Representation::Sfa, grid,
                                          std::max<std::size_t>(1, budget(Representation::Sfa)),
                                          config.seed, false);
        st.t_search_sfa = seconds_since(t);
        t = Clock::now();
        sax_lenses = search_lenses_random(data, Representation::Sax, grid,
                                          std::max<std::size_t>(1, budget(Representation::Sax)),
                                          config.seed);
        st.t_search_sax = seconds_since(t);
    }

    auto t_fit = Clock::now();
    std::vector<Lens> lenses = sax_lenses;
    lenses.insert(lenses.end(), sfa_lenses.begin(), sfa_lenses.end());
    const auto labels = data.labels();
    model.eyes.resize(lenses.size());
    parallel_for(lenses.size(), config.threads, [&](std::size_t i) {
        model.eyes[i] = fit_eye(data, labels, lenses[i], config);
    });
    st.t_train = t_smote + seconds_since(t_fit);
    return model;
}

SymbolicWord eye_word(const Eye& eye, const TimeSeries& ts) {
    return encode_word(lens_values(ts.values, eye.lens), eye.binning);
}

PredProb predict_eyes(const CoEyeModel& model, const TimeSeries& ts, VoteScope scope) {
    if (ts.values.size() != model.series_length) {
        throw SeriesLengthMismatch("series has length " + std::to_string(ts.values.size()) +
                                   ", model expects " + std::to_string(model.series_length));
    }
    std::vector<const Eye*> used;
    for (const auto& eye : model.eyes) {
        bool sax = eye.lens.rep == Representation::Sax;
        if (scope == VoteScope::Both || (scope == VoteScope::SaxOnly) == sax) used.push_back(&eye);
    }
    PredProb pred;
    pred.class_labels = model.class_labels;
    pred.matrix = {used.size(), model.class_labels.size(),
                   std::vector<double>(used.size() * model.class_labels.size())};
    auto norm = znormalize(ts.values);
    std::map<int, std::vector<double>> paa_cache;
    std::vector<double> fourier;
    int fourier_w = 0;
    bool fourier_drop = false;
    std::vector<std::uint8_t> word;
    for (std::size_t i = 0; i < used.size(); ++i) {
        const Eye& eye = *used[i];
        const auto w = static_cast<std::size_t>(eye.lens.w);
        std::span<const double> values;
        if (eye.lens.rep == Representation::Sax) {
            auto it = paa_cache.find(eye.lens.w);
            if (it == paa_cache.end()) it = paa_cache.emplace(eye.lens.w, paa(norm, w)).first;
            values = it->second;
        } else {
            if (eye.lens.w > fourier_w || eye.lens.drop_dc != fourier_drop) {
                fourier = dft_lowpass(norm, w, eye.lens.drop_dc);
                fourier_w = eye.lens.w;
                fourier_drop = eye.lens.drop_dc;
            }
            values = std::span<const double>(fourier).first(w);
        }
        word.resize(w);
        encode_values(values, eye.binning, word);
        predict_proba_row(eye.forest, word, pred.matrix.row(i));
    }
    return pred;
}

namespace {

constexpr double kConfidenceTol = 1e-12;

// Labels ordered by vote count, descending; equal counts in seeded random order.
std::vector<int> rank_labels(const std::map<int, int>& freq, std::mt19937_64& rng) {
    std::vector<std::pair<int, int>> items(freq.begin(), freq.end());
    std::shuffle(items.begin(), items.end(), rng);
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<int> out;
    for (const auto& [label, count] : items) out.push_back(label);
    return out;
}

BlockChoice choose_in_block(const ProbMatrix& m, std::size_t begin, std::size_t end,
                            std::mt19937_64& rng) {
    std::vector<double> top(end - begin);
    std::vector<int> arg(end - begin);
    double best = -1.0;
    for (std::size_t r = begin; r < end; ++r) {
        auto row = m.row(r);
        arg[r - begin] = static_cast<int>(argmax(row));
        top[r - begin] = row[arg[r - begin]];
        best = std::max(best, top[r - begin]);
    }
    auto labels_at = [&](double lo, double hi) {
        std::map<int, int> freq;
        for (std::size_t i = 0; i < top.size(); ++i) {
            if (top[i] >= lo && top[i] <= hi) ++freq[arg[i]];
        }
        return freq;
    };

    BlockChoice choice;
    choice.best_confidence = best;
    auto ranked = rank_labels(labels_at(best - kConfidenceTol, 2.0), rng);
    choice.best = ranked.front();
    if (ranked.size() > 1) {
        choice.disputed = true;
        choice.second = ranked[1];
        choice.second_confidence = best;
        return choice;
    }
    double next = -1.0;
    for (double t : top) {
        if (t < best - kConfidenceTol) next = std::max(next, t);
    }
    if (next >= 0.0) {
        auto below = rank_labels(labels_at(next - kConfidenceTol, best - kConfidenceTol), rng);
        // labels_at's upper bound is inclusive; rows at `best` are excluded by construction
        choice.second = below.front();
        choice.second_confidence = next;
    }
    return choice;
}

}  // namespace

Prediction vote(const PredProb& pred, std::size_t sax_count, std::uint64_t seed) {
    const auto& m = pred.matrix;
    if (m.rows == 0 || m.cols == 0) throw EmptyEnsemble("no eye probabilities to vote on");
    sax_count = std::min(sax_count, m.rows);
    std::mt19937_64 rng(derive_seed(seed, 0x707e));

    Prediction out;
    if (sax_count > 0) out.sax = choose_in_block(m, 0, sax_count, rng);
    if (sax_count < m.rows) out.sfa = choose_in_block(m, sax_count, m.rows, rng);

    auto label_of = [&](int column) {
        return pred.class_labels.empty() ? column : pred.class_labels.at(column);
    };
    if (!out.sax || !out.sfa) {
        const auto& only = out.sax ? *out.sax : *out.sfa;
        out.label = label_of(only.best);
        out.confidence = only.best_confidence;
        out.round = VoteRound::First;
        return out;
    }
    const auto& a = *out.sax;
    const auto& b = *out.sfa;
    if (a.best == b.best) {
        out.label = label_of(a.best);
        out.confidence = std::max(a.best_confidence, b.best_confidence);
        out.round = VoteRound::First;
    } else if (a.second >= 0 && a.second == b.second) {
        out.label = label_of(a.second);
        out.confidence = std::max(a.second_confidence, b.second_confidence);
        out.round = VoteRound::Second;
    } else {
        bool pick_sax = a.best_confidence > b.best_confidence;
        if (a.best_confidence == b.best_confidence) pick_sax = std::bernoulli_distribution(0.5)(rng);
        const auto& winner = pick_sax ? a : b;
        out.label = label_of(winner.best);
        out.confidence = winner.best_confidence;
        out.round = VoteRound::Fallback;
    }
    return out;
}

Prediction classify(const CoEyeModel& model, const TimeSeries& ts, ClassifyOptions options) {
    if (model.eyes.empty()) throw EmptyEnsemble("model has no eyes");
    auto pred = predict_eyes(model, ts, options.scope);
    std::size_t sax_rows = options.scope == VoteScope::SfaOnly ? 0
                           : options.scope == VoteScope::SaxOnly ? pred.eyes()
                                                                 : model.sax_count();
    auto out = vote(pred, sax_rows, model.config.seed);
    if (options.keep_per_eye) out.per_eye = std::move(pred);
    return out;
}

}  // namespace coeye
