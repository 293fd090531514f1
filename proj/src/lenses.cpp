#include "coeye/lenses.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "coeye/errors.hpp"
#include "coeye/parallel.hpp"

namespace coeye {

const char* to_string(Representation rep) { return rep == Representation::Sax ? "SAX" : "SFA"; }

LensGrid LensGrid::resolved(std::size_t n) const {
    LensGrid out = *this;
    auto default_alphas = [] {
        std::vector<int> a;
        for (int i = 3; i <= kMaxAlphabet; ++i) a.push_back(i);
        return a;
    };
    if (out.sax_alphas.empty()) out.sax_alphas = default_alphas();
    if (out.sfa_alphas.empty()) out.sfa_alphas = default_alphas();
    if (out.sax_word_lengths.empty()) {
        out.sax_word_lengths = {static_cast<int>(std::min<std::size_t>(n, 128))};
    }
    if (out.sfa_word_lengths.empty()) {
        for (int w = 10; w <= 130; w += 10) out.sfa_word_lengths.push_back(w);
    }
    const int len = static_cast<int>(n);
    std::erase_if(out.sax_word_lengths, [&](int w) { return w < 1 || w > len; });
    std::erase_if(out.sfa_word_lengths, [&](int w) { return w < 2 || w % 2 != 0 || w > len; });
    for (auto* list : {&out.sax_alphas, &out.sfa_alphas, &out.sax_word_lengths, &out.sfa_word_lengths}) {
        std::sort(list->begin(), list->end());
        list->erase(std::unique(list->begin(), list->end()), list->end());
    }
    for (auto* list : {&out.sax_alphas, &out.sfa_alphas}) {
        for (int a : *list) {
            if (a < 2 || a > kMaxAlphabet) {
                throw InvalidAlphabet("alphabet size " + std::to_string(a) + " outside [2, 26]");
            }
        }
    }
    if (out.folds < 2) out.folds = 2;
    return out;
}

std::vector<double> lens_values(std::span<const double> raw, const Lens& lens) {
    auto norm = znormalize(raw);
    if (lens.rep == Representation::Sax) return paa(norm, static_cast<std::size_t>(lens.w));
    return dft_lowpass(norm, static_cast<std::size_t>(lens.w), lens.drop_dc);
}

Binning fit_binning(const Lens& lens, std::span<const std::vector<double>> values, SaxMode mode) {
    if (lens.rep == Representation::Sax) return fit_sax_binning(values, lens.alpha, mode);
    return fit_mcb(values, lens.alpha, lens.drop_dc);
}

void encode_values(std::span<const double> values, const Binning& binning,
                   std::span<std::uint8_t> out) {
    if (const auto* sax_bins = std::get_if<SaxBinning>(&binning)) {
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = digitize(values[i], sax_bins->cuts);
    } else {
        const auto& table = std::get<McbTable>(binning);
        if (table.word_size() != values.size()) {
            throw InvalidWordSize("value row of width " + std::to_string(values.size()) +
                                  " against a table of width " + std::to_string(table.word_size()));
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            out[i] = digitize(values[i], table.breakpoints[i]);
        }
    }
}

SymbolicWord encode_word(std::span<const double> values, const Binning& binning) {
    SymbolicWord word;
    word.alpha = std::visit([](const auto& b) { return b.alpha(); }, binning);
    word.symbols.resize(values.size());
    encode_values(values, binning, word.symbols);
    return word;
}

std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    std::vector<int> fold(labels.size(), 0);
    std::mt19937_64 rng(seed);
    // continue the round-robin across classes so fold sizes stay even
    std::size_t cursor = 0;
    for (auto& [label, rows] : by_class) {
        std::shuffle(rows.begin(), rows.end(), rng);
        for (auto r : rows) fold[r] = static_cast<int>(cursor++ % folds);
    }
    return fold;
}

bool needs_leave_one_out(std::span<const int> labels) {
    std::map<int, int> counts;
    for (int l : labels) ++counts[l];
    return std::any_of(counts.begin(), counts.end(), [](const auto& kv) { return kv.second == 1; });
}

std::vector<Lens> select_within_margin(std::vector<Lens> scored, double margin) {
    if (scored.empty()) return scored;
    double best = -1.0;
    for (const auto& l : scored) best = std::max(best, l.cv_accuracy);
    const double threshold = best - margin - 1e-12;
    std::erase_if(scored, [&](const Lens& l) { return l.cv_accuracy < threshold; });
    std::stable_sort(scored.begin(), scored.end(), [](const Lens& a, const Lens& b) {
        return std::tie(a.alpha, a.w) < std::tie(b.alpha, b.w);
    });
    return scored;
}

namespace {

// Real-valued lens inputs per training row, computed once per search. For
// SFA the widest window is kept; narrower words are prefixes of it.
class FeatureCache {
public:
    FeatureCache(const Dataset& train, Representation rep, const LensGrid& grid, bool drop_dc)
        : rep_(rep) {
        std::vector<std::vector<double>> norm;
        norm.reserve(train.size());
        for (const auto& s : train.series()) norm.push_back(znormalize(s.values));
        if (rep == Representation::Sax) {
            for (int w : grid.sax_word_lengths) {
                auto& rows = paa_[w];
                for (const auto& x : norm) rows.push_back(paa(x, w));
            }
        } else {
            const int wmax = grid.sfa_word_lengths.back();
            for (const auto& x : norm) fourier_.push_back(dft_lowpass(x, wmax, drop_dc));
        }
    }

    std::span<const double> row(std::size_t r, int w) const {
        if (rep_ == Representation::Sax) return paa_.at(w)[r];
        return std::span<const double>(fourier_[r]).first(static_cast<std::size_t>(w));
    }

private:
    Representation rep_;
    std::map<int, std::vector<std::vector<double>>> paa_;
    std::vector<std::vector<double>> fourier_;
};

double cross_validate(const FeatureCache& cache, std::span<const int> labels,
                      std::span<const int> class_labels, std::span<const int> fold, int n_folds,
                      const Lens& lens, const SearchConfig& config, std::uint64_t point_seed) {
    const std::size_t n = labels.size();
    const std::size_t w = static_cast<std::size_t>(lens.w);
    std::size_t correct = 0;
    std::vector<double> proba(class_labels.size());
    for (int f = 0; f < n_folds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? test_rows : train_rows).push_back(i);
        if (test_rows.empty() || train_rows.empty()) continue;

        std::vector<std::vector<double>> fit_values;
        fit_values.reserve(train_rows.size());
        for (auto r : train_rows) {
            auto v = cache.row(r, lens.w);
            fit_values.emplace_back(v.begin(), v.end());
        }
        Binning binning = fit_binning(lens, fit_values, config.sax_mode);

        SymbolMatrix X(train_rows.size(), w);
        std::vector<int> y(train_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            encode_values(fit_values[i], binning, X.row(i));
            y[i] = labels[train_rows[i]];
        }
        ForestConfig fc{config.trees, derive_seed(point_seed, static_cast<std::uint64_t>(f)), 1};
        auto forest = fit_forest(X, y, fc, class_labels);

        std::vector<std::uint8_t> encoded(w);
        for (auto r : test_rows) {
            encode_values(cache.row(r, lens.w), binning, encoded);
            predict_proba_row(forest, encoded, proba);
            if (class_labels[argmax(proba)] == labels[r]) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

std::vector<Lens> grid_lenses(Representation rep, const LensGrid& grid, bool drop_dc) {
    std::vector<Lens> out;
    for (int a : grid.alphas(rep)) {
        for (int w : grid.word_lengths(rep)) {
            out.push_back({rep, a, w, rep == Representation::Sfa && drop_dc, 0.0});
        }
    }
    return out;
}

}  // namespace

std::vector<Lens> score_lens_grid(const Dataset& train, Representation rep, const LensGrid& grid_in,
                                  const SearchConfig& config, bool drop_dc) {
    if (train.empty()) throw EmptyTrainingSet("lens search on an empty training set");
    const LensGrid grid = grid_in.resolved(train.length());
    auto lenses = grid_lenses(rep, grid, drop_dc);
    if (lenses.empty()) {
        throw NoFeasibleLens(std::string(to_string(rep)) + " grid is empty for series length " +
                             std::to_string(train.length()));
    }

    const auto labels = train.labels();
    const auto& classes = train.class_labels();
    const bool loo = needs_leave_one_out(labels);
    const int n_folds = loo ? static_cast<int>(labels.size())
                            : std::min<int>(grid.folds, static_cast<int>(labels.size()));
    std::vector<int> fold(labels.size());
    if (loo) {
        std::iota(fold.begin(), fold.end(), 0);
    } else {
        fold = stratified_folds(labels, n_folds, derive_seed(config.seed, 0xf01d));
    }

    FeatureCache cache(train, rep, grid, drop_dc);
    parallel_for(lenses.size(), config.threads, [&](std::size_t i) {
        auto& lens = lenses[i];
        std::uint64_t point = (static_cast<std::uint64_t>(rep) << 40) ^
                              (static_cast<std::uint64_t>(lens.drop_dc) << 32) ^
                              (static_cast<std::uint64_t>(lens.alpha) << 16) ^
                              static_cast<std::uint64_t>(lens.w);
        lens.cv_accuracy = cross_validate(cache, labels, classes, fold, n_folds, lens, config,
                                          derive_seed(config.seed, point));
    });
    return lenses;
}

std::vector<Lens> search_lenses(const Dataset& train, Representation rep, const LensGrid& grid,
                                const SearchConfig& config, bool drop_dc) {
    return select_within_margin(score_lens_grid(train, rep, grid, config, drop_dc));
}

std::vector<Lens> search_lenses_random(const Dataset& train, Representation rep,
                                       const LensGrid& grid_in, std::size_t budget,
                                       std::uint64_t seed, bool drop_dc) {
    if (budget < 1) throw NoFeasibleLens("random lens budget must be >= 1");
    const LensGrid grid = grid_in.resolved(train.length());
    auto lenses = grid_lenses(rep, grid, drop_dc);
    if (lenses.empty()) {
        throw NoFeasibleLens(std::string(to_string(rep)) + " grid is empty for series length " +
                             std::to_string(train.length()));
    }
    budget = std::min(budget, lenses.size());
    std::mt19937_64 rng(derive_seed(seed, 0x7a4d + static_cast<std::uint64_t>(rep)));
    std::vector<Lens> picked;
    std::sample(lenses.begin(), lenses.end(), std::back_inserter(picked), budget, rng);
    return picked;
}

SfaSearch search_sfa_lenses(const Dataset& train, const LensGrid& grid, const SearchConfig& config) {
    auto keep = score_lens_grid(train, Representation::Sfa, grid, config, false);
    auto drop = score_lens_grid(train, Representation::Sfa, grid, config, true);
    auto best_of = [](const std::vector<Lens>& v) {
        double b = 0.0;
        for (const auto& l : v) b = std::max(b, l.cv_accuracy);
        return b;
    };
    SfaSearch out;
    out.best_keep_dc = best_of(keep);
    out.best_drop_dc = best_of(drop);
    out.drop_dc = out.best_drop_dc > out.best_keep_dc;
    out.lenses = select_within_margin(out.drop_dc ? std::move(drop) : std::move(keep));
    return out;
}

bool choose_sfa_normalization(const Dataset& train, const LensGrid& grid, const SearchConfig& config) {
    return search_sfa_lenses(train, grid, config).drop_dc;
}

}  // namespace coeye
