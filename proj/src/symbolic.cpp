#include "coeye/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "coeye/errors.hpp"

namespace coeye {

std::string SymbolicWord::str() const {
    std::string out;
    out.reserve(symbols.size());
    for (auto s : symbols) out.push_back(static_cast<char>('a' + s));
    return out;
}

const char* to_string(SaxMode mode) { return mode == SaxMode::Gaussian ? "gaussian" : "minmax"; }

SaxMode parse_sax_mode(const std::string& text) {
    if (text == "gaussian") return SaxMode::Gaussian;
    if (text == "minmax") return SaxMode::MinMax;
    throw InvalidArgument("unknown SAX binning mode '" + text + "'");
}

namespace {

void check_alpha(int alpha) {
    if (alpha < 2 || alpha > kMaxAlphabet) {
        throw InvalidAlphabet("alphabet size " + std::to_string(alpha) + " outside [2, 26]");
    }
}

// Forces strict increase by stepping to the next representable double.
void make_strictly_increasing(std::vector<double>& cuts) {
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        if (!(cuts[i] > cuts[i - 1])) {
            cuts[i] = std::nextafter(cuts[i - 1], std::numeric_limits<double>::infinity());
        }
    }
}

}  // namespace

std::vector<double> paa(std::span<const double> values, std::size_t w) {
    const std::size_t n = values.size();
    if (w < 1 || w > n) {
        throw InvalidWordSize("PAA word size " + std::to_string(w) + " not in [1, " +
                              std::to_string(n) + "]");
    }
    std::vector<double> out(w);
    for (std::size_t i = 0; i < w; ++i) {
        std::size_t lo = i * n / w;
        std::size_t hi = (i + 1) * n / w;
        double sum = 0.0;
        for (std::size_t t = lo; t < hi; ++t) sum += values[t];
        out[i] = sum / static_cast<double>(hi - lo);
    }
    return out;
}

std::vector<double> gaussian_cuts(int alpha) {
    check_alpha(alpha);
    boost::math::normal_distribution<double> normal;
    std::vector<double> cuts(alpha - 1);
    for (int k = 1; k < alpha; ++k) {
        cuts[k - 1] = boost::math::quantile(normal, static_cast<double>(k) / alpha);
    }
    // the median comes out as -0 on some platforms
    for (double& c : cuts) {
        if (c == 0.0) c = 0.0;
    }
    return cuts;
}

std::uint8_t digitize(double v, std::span<const double> cuts) {
    return static_cast<std::uint8_t>(std::lower_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

SaxBinning fit_sax_binning(std::span<const std::vector<double>> paa_rows, int alpha,
                           SaxMode mode) {
    check_alpha(alpha);
    SaxBinning binning;
    binning.mode = mode;
    if (mode == SaxMode::Gaussian) {
        binning.cuts = gaussian_cuts(alpha);
        return binning;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& row : paa_rows) {
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(hi > lo)) {
        binning.cuts = gaussian_cuts(alpha);
        binning.degenerate = true;
        return binning;
    }
    binning.cuts.resize(alpha - 1);
    double width = (hi - lo) / alpha;
    for (int k = 1; k < alpha; ++k) binning.cuts[k - 1] = lo + width * k;
    make_strictly_increasing(binning.cuts);
    return binning;
}

SaxBinning fit_sax_binning(const Dataset& train, int alpha, SaxMode mode, std::size_t w) {
    std::vector<std::vector<double>> rows;
    if (mode == SaxMode::MinMax) {
        rows.reserve(train.size());
        for (const auto& s : train.series()) rows.push_back(paa(znormalize(s.values), w));
    }
    return fit_sax_binning(rows, alpha, mode);
}

SymbolicWord sax(const TimeSeries& ts, std::size_t w, const SaxBinning& binning) {
    auto means = paa(znormalize(ts.values), w);
    SymbolicWord word;
    word.alpha = binning.alpha();
    word.symbols.reserve(w);
    for (double v : means) word.symbols.push_back(digitize(v, binning.cuts));
    return word;
}

std::vector<double> dft_lowpass(std::span<const double> values, std::size_t w, bool drop_dc) {
    const std::size_t n = values.size();
    if (w < 2 || w % 2 != 0) {
        throw InvalidWordSize("DFT word size " + std::to_string(w) + " must be even and >= 2");
    }
    const std::size_t first = drop_dc ? 1 : 0;
    const std::size_t count = w / 2;
    if (n == 0 || first + count > n) {
        throw InvalidWordSize("DFT word size " + std::to_string(w) +
                              " needs more coefficients than a length-" + std::to_string(n) +
                              " series has");
    }
    // twiddles indexed by (k * t) mod n keep the phase exact for large k*t
    std::vector<double> cosines(n), sines(n);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        cosines[j] = std::cos(step * static_cast<double>(j));
        sines[j] = std::sin(step * static_cast<double>(j));
    }
    std::vector<double> out(w);
    for (std::size_t c = 0; c < count; ++c) {
        const std::size_t k = first + c;
        double re = 0.0, im = 0.0;
        std::size_t phase = 0;
        for (std::size_t t = 0; t < n; ++t) {
            re += values[t] * cosines[phase];
            im -= values[t] * sines[phase];
            phase += k;
            if (phase >= n) phase -= n;
        }
        out[2 * c] = re;
        out[2 * c + 1] = im;
    }
    return out;
}

std::vector<double> equal_depth_breakpoints(std::vector<double> column, int alpha) {
    check_alpha(alpha);
    std::vector<double> cuts(alpha - 1, 0.0);
    if (column.empty()) {
        make_strictly_increasing(cuts);
        return cuts;
    }
    std::sort(column.begin(), column.end());
    const std::size_t s = column.size();
    for (int j = 1; j < alpha; ++j) {
        std::size_t boundary = static_cast<std::size_t>(j) * s / static_cast<std::size_t>(alpha);
        cuts[j - 1] = boundary == 0 ? column.front()
                                    : 0.5 * (column[boundary - 1] + column[boundary]);
    }
    make_strictly_increasing(cuts);
    return cuts;
}

McbTable fit_mcb(std::span<const std::vector<double>> fourier_rows, int alpha, bool drop_dc) {
    check_alpha(alpha);
    McbTable table;
    table.drop_dc = drop_dc;
    table.degenerate = fourier_rows.size() < static_cast<std::size_t>(alpha);
    const std::size_t w = fourier_rows.empty() ? 0 : fourier_rows.front().size();
    table.breakpoints.reserve(w);
    std::vector<double> column(fourier_rows.size());
    for (std::size_t j = 0; j < w; ++j) {
        for (std::size_t r = 0; r < fourier_rows.size(); ++r) column[r] = fourier_rows[r][j];
        table.breakpoints.push_back(equal_depth_breakpoints(column, alpha));
    }
    return table;
}

McbTable fit_mcb(const Dataset& train, int alpha, std::size_t w, bool drop_dc) {
    std::vector<std::vector<double>> rows;
    rows.reserve(train.size());
    for (const auto& s : train.series()) rows.push_back(dft_lowpass(znormalize(s.values), w, drop_dc));
    if (rows.empty()) {
        // keep the table shape even with no data
        McbTable table;
        table.drop_dc = drop_dc;
        table.degenerate = true;
        table.breakpoints.assign(w, equal_depth_breakpoints({}, alpha));
        return table;
    }
    return fit_mcb(rows, alpha, drop_dc);
}

SymbolicWord sfa_from_fourier(std::span<const double> fourier, const McbTable& table) {
    if (fourier.size() != table.word_size()) {
        throw InvalidWordSize("Fourier row of width " + std::to_string(fourier.size()) +
                              " against a table of width " + std::to_string(table.word_size()));
    }
    SymbolicWord word;
    word.alpha = table.alpha();
    word.symbols.reserve(fourier.size());
    for (std::size_t j = 0; j < fourier.size(); ++j) {
        word.symbols.push_back(digitize(fourier[j], table.breakpoints[j]));
    }
    return word;
}

SymbolicWord sfa(const TimeSeries& ts, const McbTable& table) {
    auto fourier = dft_lowpass(znormalize(ts.values), table.word_size(), table.drop_dc);
    return sfa_from_fourier(fourier, table);
}

}  // namespace coeye
