#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coeye/data.hpp"

namespace coeye {

inline constexpr int kMaxAlphabet = 26;

// A word of w symbols over an alphabet of size alpha; symbol i is in [0, alpha).
struct SymbolicWord {
    std::vector<std::uint8_t> symbols;
    int alpha = 0;

    std::size_t size() const noexcept { return symbols.size(); }
    // Lowercase rendering, 'a' for symbol 0.
    std::string str() const;
};

enum class SaxMode { Gaussian, MinMax };

const char* to_string(SaxMode mode);
SaxMode parse_sax_mode(const std::string& text);

struct SaxBinning {
    SaxMode mode = SaxMode::MinMax;
    std::vector<double> cuts;  // alpha - 1, strictly increasing
    // MinMax fit found a zero-width range and used gaussian cuts instead.
    bool degenerate = false;

    int alpha() const noexcept { return static_cast<int>(cuts.size()) + 1; }
};

// Per-column breakpoints for w Fourier values.
struct McbTable {
    std::vector<std::vector<double>> breakpoints;  // w rows of alpha - 1
    bool drop_dc = false;
    // Fewer training series than alpha symbols.
    bool degenerate = false;

    int alpha() const noexcept {
        return breakpoints.empty() ? 0 : static_cast<int>(breakpoints.front().size()) + 1;
    }
    std::size_t word_size() const noexcept { return breakpoints.size(); }
};

// Segment means over [floor(i*n/w), floor((i+1)*n/w)).
std::vector<double> paa(std::span<const double> values, std::size_t w);

// Standard-normal quantiles at k/alpha, k = 1..alpha-1.
std::vector<double> gaussian_cuts(int alpha);

// Number of cuts strictly below v; a value on a cut goes to the lower bin.
std::uint8_t digitize(double v, std::span<const double> cuts);

// MinMax spans [min, max] of all PAA values of the z-normalized training set.
SaxBinning fit_sax_binning(const Dataset& train, int alpha, SaxMode mode, std::size_t w);
// Same fit over PAA vectors already computed.
SaxBinning fit_sax_binning(std::span<const std::vector<double>> paa_rows, int alpha,
                           SaxMode mode);

SymbolicWord sax(const TimeSeries& ts, std::size_t w, const SaxBinning& binning);

// Interleaved [re, im] of the first w/2 coefficients of the unnormalized
// forward DFT; with drop_dc the coefficients start at index 1.
std::vector<double> dft_lowpass(std::span<const double> values, std::size_t w, bool drop_dc);

// Equal-depth breakpoints for one column: alpha - 1 midpoints.
std::vector<double> equal_depth_breakpoints(std::vector<double> column, int alpha);

// Fits from Fourier rows (each of width w).
McbTable fit_mcb(std::span<const std::vector<double>> fourier_rows, int alpha, bool drop_dc);
McbTable fit_mcb(const Dataset& train, int alpha, std::size_t w, bool drop_dc);

SymbolicWord sfa(const TimeSeries& ts, const McbTable& table);
SymbolicWord sfa_from_fourier(std::span<const double> fourier, const McbTable& table);

}  // namespace coeye
