#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace coeye {

// Row-major matrix of symbol indices.
class SymbolMatrix {
public:
    SymbolMatrix() = default;
    SymbolMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<std::uint8_t> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const std::uint8_t> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::uint8_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> data_;
};

// Row-major probability matrix, one row per input.
struct ProbMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
    std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
};

// CART tree with ordered threshold splits: x[feature] <= threshold goes left.
// Node i is a leaf when feature[i] < 0; its class counts live at
// counts[i * n_classes ...].
struct DecisionTree {
    std::vector<std::int32_t> feature;
    std::vector<std::int32_t> threshold;
    std::vector<std::int32_t> left;
    std::vector<std::int32_t> right;
    std::vector<std::uint32_t> counts;

    std::size_t node_count() const noexcept { return feature.size(); }
    // Index of the leaf reached by x.
    std::size_t leaf_for(std::span<const std::uint8_t> x) const;
};

struct ForestConfig {
    int n_estimators = 100;
    std::uint64_t seed = 42;
    // Worker threads for tree fitting; 0 = all cores. Results do not depend on it.
    int threads = 1;
};

struct RandomForestModel {
    std::vector<DecisionTree> trees;
    std::vector<int> class_labels;
    std::size_t n_features = 0;
    std::uint64_t seed = 0;

    std::size_t n_classes() const noexcept { return class_labels.size(); }
};

// Bootstrap + ceil(sqrt(w)) random features per node + best Gini split,
// grown until pure or no split lowers impurity. `class_labels`, when given,
// fixes the probability column order and must contain every label in y.
RandomForestModel fit_forest(const SymbolMatrix& X, std::span<const int> y,
                             const ForestConfig& config,
                             std::span<const int> class_labels = {});

// Average over trees of leaf class frequencies.
ProbMatrix predict_proba(const RandomForestModel& model, const SymbolMatrix& X);
void predict_proba_row(const RandomForestModel& model, std::span<const std::uint8_t> x,
                       std::span<double> out);

// Column of the row maximum; ties go to the lowest column.
std::size_t argmax(std::span<const double> row);

}  // namespace coeye
