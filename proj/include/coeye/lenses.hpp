#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "coeye/data.hpp"
#include "coeye/forest.hpp"
#include "coeye/symbolic.hpp"

namespace coeye {

enum class Representation : int { Sax = 0, Sfa = 1 };

const char* to_string(Representation rep);

// One parameterised symbolic view of a series.
struct Lens {
    Representation rep = Representation::Sax;
    int alpha = 0;
    int w = 0;
    bool drop_dc = false;  // SFA only
    double cv_accuracy = 0.0;

    bool operator==(const Lens&) const = default;
};

// Empty lists mean "use the default for this series length".
struct LensGrid {
    std::vector<int> sax_alphas;
    std::vector<int> sax_word_lengths;
    std::vector<int> sfa_alphas;
    std::vector<int> sfa_word_lengths;
    int folds = 5;

    // Defaults filled in and word lengths filtered to what fits in n.
    LensGrid resolved(std::size_t n) const;

    const std::vector<int>& alphas(Representation rep) const {
        return rep == Representation::Sax ? sax_alphas : sfa_alphas;
    }
    const std::vector<int>& word_lengths(Representation rep) const {
        return rep == Representation::Sax ? sax_word_lengths : sfa_word_lengths;
    }
    std::size_t size(Representation rep) const {
        return alphas(rep).size() * word_lengths(rep).size();
    }
};

struct SearchConfig {
    int trees = 100;
    std::uint64_t seed = 42;
    int threads = 0;
    SaxMode sax_mode = SaxMode::MinMax;
};

using Binning = std::variant<SaxBinning, McbTable>;

// z-normalize, then PAA (SAX) or low-pass DFT (SFA).
std::vector<double> lens_values(std::span<const double> raw, const Lens& lens);

Binning fit_binning(const Lens& lens, std::span<const std::vector<double>> values, SaxMode mode);

void encode_values(std::span<const double> values, const Binning& binning,
                   std::span<std::uint8_t> out);
SymbolicWord encode_word(std::span<const double> values, const Binning& binning);

// Fold id per row, stratified per class from a seeded shuffle.
std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

// True when some class has a single instance (the LOO trigger).
bool needs_leave_one_out(std::span<const int> labels);

// Keeps every lens with cv_accuracy >= max - margin, ordered by (alpha, w).
std::vector<Lens> select_within_margin(std::vector<Lens> scored, double margin = 0.01);

// Cross-validated accuracy of every grid pair; ordered by (alpha, w).
std::vector<Lens> score_lens_grid(const Dataset& train, Representation rep, const LensGrid& grid,
                                  const SearchConfig& config, bool drop_dc = false);

std::vector<Lens> search_lenses(const Dataset& train, Representation rep, const LensGrid& grid,
                                const SearchConfig& config, bool drop_dc = false);

// `budget` distinct pairs drawn uniformly from the grid, no CV.
std::vector<Lens> search_lenses_random(const Dataset& train, Representation rep,
                                       const LensGrid& grid, std::size_t budget,
                                       std::uint64_t seed, bool drop_dc = false);

struct SfaSearch {
    bool drop_dc = false;
    double best_keep_dc = 0.0;
    double best_drop_dc = 0.0;
    std::vector<Lens> lenses;  // selected under the chosen flag
};

// Scores the SFA grid with and without the DC term; higher best accuracy
// wins, ties keep the DC term.
SfaSearch search_sfa_lenses(const Dataset& train, const LensGrid& grid, const SearchConfig& config);
bool choose_sfa_normalization(const Dataset& train, const LensGrid& grid, const SearchConfig& config);

}  // namespace coeye
