#include "coeye/forest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "coeye/errors.hpp"
#include "coeye/parallel.hpp"

namespace coeye {

std::size_t DecisionTree::leaf_for(std::span<const std::uint8_t> x) const {
    std::size_t node = 0;
    while (feature[node] >= 0) {
        node = x[feature[node]] <= threshold[node] ? left[node] : right[node];
    }
    return node;
}

std::size_t argmax(std::span<const double> row) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j) {
        if (row[j] > row[best]) best = j;
    }
    return best;
}

namespace {

constexpr std::size_t kSymbolValues = 256;
constexpr double kMinDecrease = 1e-12;

struct Split {
    int feature = -1;
    int threshold = 0;
    double score = 0.0;  // weighted child impurity, lower is better
};

class TreeBuilder {
public:
    TreeBuilder(const SymbolMatrix& X, std::span<const int> y, std::size_t n_classes,
                std::uint64_t seed)
        : X_(X), y_(y), n_classes_(n_classes), rng_(seed) {
        mtry_ = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(X.cols()))));
        mtry_ = std::clamp<std::size_t>(mtry_, 1, std::max<std::size_t>(X.cols(), 1));
        features_.resize(X.cols());
        hist_.resize(kSymbolValues * n_classes_);
    }

    DecisionTree build() {
        const std::size_t n = X_.rows();
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        samples_.resize(n);
        for (auto& s : samples_) s = pick(rng_);

        struct Pending {
            std::size_t node, begin, end;
        };
        std::vector<Pending> stack;
        stack.push_back({new_node(), 0, n});
        std::vector<std::uint32_t> node_counts(n_classes_);
        while (!stack.empty()) {
            auto [node, begin, end] = stack.back();
            stack.pop_back();

            std::fill(node_counts.begin(), node_counts.end(), 0u);
            for (std::size_t i = begin; i < end; ++i) ++node_counts[y_[samples_[i]]];

            std::size_t nonzero = std::count_if(node_counts.begin(), node_counts.end(),
                                                [](auto c) { return c > 0; });
            Split split;
            if (nonzero > 1 && end - begin >= 2) split = find_split(begin, end, node_counts);
            if (split.feature < 0) {
                std::copy(node_counts.begin(), node_counts.end(),
                          tree_.counts.begin() + node * n_classes_);
                continue;
            }
            auto mid = std::partition(samples_.begin() + begin, samples_.begin() + end,
                                      [&](std::size_t s) {
                                          return X_(s, split.feature) <= split.threshold;
                                      }) -
                       samples_.begin();
            std::size_t l = new_node();
            std::size_t r = new_node();
            tree_.feature[node] = split.feature;
            tree_.threshold[node] = split.threshold;
            tree_.left[node] = static_cast<std::int32_t>(l);
            tree_.right[node] = static_cast<std::int32_t>(r);
            stack.push_back({r, static_cast<std::size_t>(mid), end});
            stack.push_back({l, begin, static_cast<std::size_t>(mid)});
        }
        return std::move(tree_);
    }

private:
    std::size_t new_node() {
        tree_.feature.push_back(-1);
        tree_.threshold.push_back(0);
        tree_.left.push_back(-1);
        tree_.right.push_back(-1);
        tree_.counts.resize(tree_.counts.size() + n_classes_, 0u);
        return tree_.feature.size() - 1;
    }

    static double gini_mass(std::span<const double> counts, double total) {
        if (total <= 0.0) return 0.0;
        double sq = 0.0;
        for (double c : counts) sq += c * c;
        return total - sq / total;  // total * gini
    }

    Split find_split(std::size_t begin, std::size_t end, std::span<const std::uint32_t> counts) {
        const double total = static_cast<double>(end - begin);
        std::vector<double> parent(counts.begin(), counts.end());
        const double parent_mass = gini_mass(parent, total);

        std::iota(features_.begin(), features_.end(), 0);
        Split best;
        best.score = parent_mass;
        bool any_valid = false;
        std::vector<double> left(n_classes_), right(n_classes_);
        // Partial Fisher-Yates: draw mtry features, keep drawing past mtry
        // only while every drawn feature is constant on this node.
        for (std::size_t drawn = 0; drawn < features_.size(); ++drawn) {
            if (drawn >= mtry_ && any_valid) break;
            std::uniform_int_distribution<std::size_t> pick(drawn, features_.size() - 1);
            std::swap(features_[drawn], features_[pick(rng_)]);
            const int f = static_cast<int>(features_[drawn]);

            int lo = 255, hi = 0;
            std::fill(hist_.begin(), hist_.end(), 0u);
            for (std::size_t i = begin; i < end; ++i) {
                auto s = samples_[i];
                int v = X_(s, f);
                ++hist_[v * n_classes_ + y_[s]];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (lo == hi) continue;
            any_valid = true;

            std::fill(left.begin(), left.end(), 0.0);
            double n_left = 0.0;
            for (int t = lo; t < hi; ++t) {
                double added = 0.0;
                for (std::size_t c = 0; c < n_classes_; ++c) {
                    double h = hist_[t * n_classes_ + c];
                    left[c] += h;
                    added += h;
                }
                if (added == 0.0) continue;
                n_left += added;
                for (std::size_t c = 0; c < n_classes_; ++c) right[c] = parent[c] - left[c];
                double score = gini_mass(left, n_left) + gini_mass(right, total - n_left);
                bool better = score < best.score - kMinDecrease;
                bool tied = !better && std::abs(score - best.score) <= kMinDecrease &&
                            best.feature >= 0 &&
                            (f < best.feature || (f == best.feature && t < best.threshold));
                if (better || tied) best = {f, t, score};
            }
        }
        if (best.feature >= 0 && parent_mass - best.score <= kMinDecrease) best.feature = -1;
        return best;
    }

    const SymbolMatrix& X_;
    std::span<const int> y_;
    std::size_t n_classes_;
    std::mt19937_64 rng_;
    std::size_t mtry_ = 1;
    std::vector<std::size_t> samples_;
    std::vector<std::size_t> features_;
    std::vector<std::uint32_t> hist_;
    DecisionTree tree_;
};

}  // namespace

RandomForestModel fit_forest(const SymbolMatrix& X, std::span<const int> y,
                             const ForestConfig& config, std::span<const int> class_labels) {
    if (X.rows() == 0 || X.cols() == 0) throw EmptyTrainingSet("no training rows");
    if (y.size() != X.rows()) {
        throw FeatureMismatch(std::to_string(y.size()) + " labels for " +
                              std::to_string(X.rows()) + " rows");
    }
    if (config.n_estimators < 1) throw EmptyTrainingSet("n_estimators must be >= 1");

    RandomForestModel model;
    model.n_features = X.cols();
    model.seed = config.seed;
    if (class_labels.empty()) {
        model.class_labels.assign(y.begin(), y.end());
        std::sort(model.class_labels.begin(), model.class_labels.end());
        model.class_labels.erase(std::unique(model.class_labels.begin(), model.class_labels.end()),
                                 model.class_labels.end());
    } else {
        model.class_labels.assign(class_labels.begin(), class_labels.end());
    }

    std::vector<int> y_index(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto it = std::find(model.class_labels.begin(), model.class_labels.end(), y[i]);
        if (it == model.class_labels.end()) {
            throw FeatureMismatch("label " + std::to_string(y[i]) + " not in class list");
        }
        y_index[i] = static_cast<int>(it - model.class_labels.begin());
    }

    model.trees.resize(config.n_estimators);
    parallel_for(model.trees.size(), config.threads, [&](std::size_t t) {
        TreeBuilder builder(X, y_index, model.class_labels.size(), derive_seed(config.seed, t));
        model.trees[t] = builder.build();
    });
    return model;
}

void predict_proba_row(const RandomForestModel& model, std::span<const std::uint8_t> x,
                       std::span<double> out) {
    if (x.size() != model.n_features) {
        throw FeatureMismatch("row width " + std::to_string(x.size()) + ", forest expects " +
                              std::to_string(model.n_features));
    }
    const std::size_t c = model.n_classes();
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& tree : model.trees) {
        auto leaf = tree.leaf_for(x);
        const auto* counts = tree.counts.data() + leaf * c;
        double total = 0.0;
        for (std::size_t j = 0; j < c; ++j) total += counts[j];
        for (std::size_t j = 0; j < c; ++j) out[j] += counts[j] / total;
    }
    const double k = static_cast<double>(model.trees.size());
    for (auto& v : out) v /= k;
}

ProbMatrix predict_proba(const RandomForestModel& model, const SymbolMatrix& X) {
    if (X.cols() != model.n_features) {
        throw FeatureMismatch("matrix width " + std::to_string(X.cols()) + ", forest expects " +
                              std::to_string(model.n_features));
    }
    ProbMatrix out{X.rows(), model.n_classes(), std::vector<double>(X.rows() * model.n_classes())};
    for (std::size_t r = 0; r < X.rows(); ++r) predict_proba_row(model, X.row(r), out.row(r));
    return out;
}

}  // namespace coeye
