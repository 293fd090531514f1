#include "coeye/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "coeye/errors.hpp"

namespace coeye {

Dataset::Dataset(std::string name, std::vector<TimeSeries> series)
    : name_(std::move(name)), series_(std::move(series)) {
    if (series_.empty()) return;
    length_ = series_.front().values.size();
    std::set<int> labels;
    for (std::size_t i = 0; i < series_.size(); ++i) {
        if (series_[i].values.size() != length_) {
            throw RaggedData("series " + std::to_string(i) + " has length " +
                             std::to_string(series_[i].values.size()) + ", expected " +
                             std::to_string(length_));
        }
        if (series_[i].label) labels.insert(*series_[i].label);
    }
    class_labels_.assign(labels.begin(), labels.end());
}

std::vector<int> Dataset::labels() const {
    std::vector<int> out;
    out.reserve(series_.size());
    for (const auto& s : series_) {
        if (!s.label) throw ParseError("dataset '" + name_ + "' has unlabeled series");
        out.push_back(*s.label);
    }
    return out;
}

int Dataset::class_index(int label) const {
    auto it = std::lower_bound(class_labels_.begin(), class_labels_.end(), label);
    if (it == class_labels_.end() || *it != label) return -1;
    return static_cast<int>(it - class_labels_.begin());
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    std::vector<TimeSeries> picked;
    picked.reserve(rows.size());
    for (auto r : rows) picked.push_back(series_.at(r));
    return Dataset(name_, std::move(picked));
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delim, start);
        auto field = line.substr(start, pos == std::string_view::npos ? line.npos : pos - start);
        // tolerate padding around fields
        while (!field.empty() && (field.front() == ' ')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
        out.push_back(field);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    // a trailing delimiter yields one empty field
    if (out.size() > 1 && out.back().empty()) out.pop_back();
    return out;
}

double parse_number(std::string_view field, const std::string& source, std::size_t line,
                    std::size_t column) {
    double value = 0.0;
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": not a finite number: '" + std::string(field) + "'");
    }
    return value;
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(),
                       [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

}  // namespace

Dataset parse_ucr(const std::string& text, const std::string& source, LoadOptions options) {
    char delim = '\t';
    if (options.delimiter == Delimiter::Comma) {
        delim = ',';
    } else if (options.delimiter == Delimiter::Auto) {
        // tab wins whenever the first data line has one
        std::string_view view(text);
        auto first = view.substr(0, view.find('\n'));
        delim = first.find('\t') != std::string_view::npos ? '\t'
                : first.find(',') != std::string_view::npos ? ','
                                                            : '\t';
    }

    std::vector<TimeSeries> rows;
    std::size_t expected = 0;
    std::size_t line_no = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        auto fields = split_fields(line, delim);
        std::size_t offset = options.has_labels ? 1 : 0;
        if (fields.size() <= offset) {
            throw RaggedData(source + ":" + std::to_string(line_no) + ": row has no values");
        }
        std::size_t count = fields.size() - offset;
        if (rows.empty()) {
            expected = count;
        } else if (count != expected) {
            throw RaggedData(source + ":" + std::to_string(line_no) + ": row has " +
                             std::to_string(count) + " values, expected " +
                             std::to_string(expected));
        }
        TimeSeries ts;
        if (options.has_labels) {
            double label = parse_number(fields[0], source, line_no, 1);
            if (label != std::floor(label) || std::abs(label) > 1e9) {
                throw ParseError(source + ":" + std::to_string(line_no) +
                                 ":1: class label is not an integer: '" +
                                 std::string(fields[0]) + "'");
            }
            ts.label = static_cast<int>(label);
        }
        ts.values.reserve(count);
        for (std::size_t c = offset; c < fields.size(); ++c) {
            ts.values.push_back(parse_number(fields[c], source, line_no, c + 1));
        }
        rows.push_back(std::move(ts));
    }
    if (rows.empty()) throw EmptyDataset(source + ": no series");

    auto name = std::filesystem::path(source).stem().string();
    for (const char* suffix : {"_TRAIN", "_TEST"}) {
        auto pos = name.rfind(suffix);
        if (pos != std::string::npos && pos + std::string(suffix).size() == name.size()) {
            name.erase(pos);
            break;
        }
    }
    return Dataset(name, std::move(rows));
}

Dataset load_ucr(const std::filesystem::path& path, LoadOptions options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ucr(buf.str(), path.string(), options);
}

void write_ucr(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << std::setprecision(17);
    for (const auto& s : data.series()) {
        bool first = true;
        if (s.label) {
            out << *s.label;
            first = false;
        }
        for (double v : s.values) {
            if (!first) out << '\t';
            out << v;
            first = false;
        }
        out << '\n';
    }
}

std::optional<std::filesystem::path> find_split_file(const std::filesystem::path& dir,
                                                     const std::string& name,
                                                     const std::string& split) {
    for (const char* ext : {".tsv", ".txt", ".csv", ""}) {
        auto p = dir / (name + "_" + split + ext);
        if (std::filesystem::is_regular_file(p)) return p;
        auto nested = dir / name / (name + "_" + split + ext);
        if (std::filesystem::is_regular_file(nested)) return nested;
    }
    return std::nullopt;
}

std::vector<double> znormalize(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    if (values.empty()) return out;
    double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / n);
    if (sd == 0.0 || sd < 1e-12 * std::max(1.0, std::abs(mean))) {
        std::fill(out.begin(), out.end(), 0.0);
        return out;
    }
    for (double& v : out) v = (v - mean) / sd;
    return out;
}

TimeSeries znormalize(const TimeSeries& ts) { return {znormalize(ts.values), ts.label}; }

}  // namespace coeye
