#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace coeye {

struct TimeSeries {
    std::vector<double> values;
    std::optional<int> label;
};

// Labeled fixed-length series. Immutable by convention once built.
class Dataset {
public:
    Dataset() = default;

    // Validates equal lengths and derives the sorted label set.
    Dataset(std::string name, std::vector<TimeSeries> series);

    const std::string& name() const noexcept { return name_; }
    std::size_t length() const noexcept { return length_; }
    std::size_t size() const noexcept { return series_.size(); }
    bool empty() const noexcept { return series_.empty(); }
    const std::vector<TimeSeries>& series() const noexcept { return series_; }
    const TimeSeries& operator[](std::size_t i) const { return series_[i]; }
    const std::vector<int>& class_labels() const noexcept { return class_labels_; }

    // Labels in row order; throws if any row is unlabeled.
    std::vector<int> labels() const;

    // Index of `label` in class_labels(), or -1.
    int class_index(int label) const;

    Dataset subset(std::span<const std::size_t> rows) const;

private:
    std::string name_;
    std::size_t length_ = 0;
    std::vector<TimeSeries> series_;
    std::vector<int> class_labels_;
};

enum class Delimiter { Auto, Tab, Comma };

struct LoadOptions {
    Delimiter delimiter = Delimiter::Auto;
    // false: every field is a value and series carry no label.
    bool has_labels = true;
};

// Reads a UCR flat file: one series per line, label first.
Dataset load_ucr(const std::filesystem::path& path, LoadOptions options = {});

// Parses UCR text already in memory; `source` names it in error messages.
Dataset parse_ucr(const std::string& text, const std::string& source,
                  LoadOptions options = {});

// Writes tab-separated rows with 17 significant digits.
void write_ucr(const Dataset& data, const std::filesystem::path& path);

// Finds <dir>/<name>_<SPLIT>{.tsv,.txt,.csv,} ; nullopt when absent.
std::optional<std::filesystem::path> find_split_file(const std::filesystem::path& dir,
                                                     const std::string& name,
                                                     const std::string& split);

// Mean 0 / population std 1. A constant series maps to all zeros.
std::vector<double> znormalize(std::span<const double> values);
TimeSeries znormalize(const TimeSeries& ts);

}  // namespace coeye
