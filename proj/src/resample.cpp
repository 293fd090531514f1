#include "coeye/resample.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "coeye/errors.hpp"

namespace coeye {

std::size_t SmoteReport::total_added() const {
    std::size_t total = 0;
    for (const auto& [label, count] : added_counts) total += count;
    return total;
}

std::map<int, std::size_t> class_counts(const Dataset& data) {
    std::map<int, std::size_t> counts;
    for (int label : data.labels()) ++counts[label];
    return counts;
}

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

}  // namespace

SmoteResult smote(const Dataset& train, int k, std::uint64_t seed) {
    auto counts = class_counts(train);
    if (counts.size() < 2) throw NoMinorityClass("dataset has a single class");

    SmoteReport report;
    report.original_counts = counts;
    std::size_t majority = 0;
    for (const auto& [label, count] : counts) majority = std::max(majority, count);

    std::vector<TimeSeries> rows = train.series();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (const auto& [label, count] : counts) {
        report.added_counts[label] = 0;
        if (count == majority || count < 2) continue;

        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < train.size(); ++i) {
            if (*train[i].label == label) members.push_back(i);
        }
        const std::size_t kk = std::min<std::size_t>(std::max(k, 1), members.size() - 1);

        // k nearest same-class neighbours of each member; ties by index
        std::vector<std::vector<std::size_t>> neighbours(members.size());
        for (std::size_t a = 0; a < members.size(); ++a) {
            std::vector<std::pair<double, std::size_t>> dist;
            for (std::size_t b = 0; b < members.size(); ++b) {
                if (a == b) continue;
                dist.emplace_back(squared_distance(train[members[a]].values, train[members[b]].values), b);
            }
            std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
            for (std::size_t j = 0; j < kk; ++j) neighbours[a].push_back(dist[j].second);
        }

        std::uniform_int_distribution<std::size_t> pick_member(0, members.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_neighbour(0, kk - 1);
        const std::size_t needed = majority - count;
        for (std::size_t s = 0; s < needed; ++s) {
            std::size_t a = pick_member(rng);
            std::size_t b = neighbours[a][pick_neighbour(rng)];
            double u = unit(rng);
            const auto& x = train[members[a]].values;
            const auto& nn = train[members[b]].values;
            TimeSeries synthetic;
            synthetic.label = label;
            synthetic.values.resize(x.size());
            for (std::size_t t = 0; t < x.size(); ++t) synthetic.values[t] = x[t] + u * (nn[t] - x[t]);
            rows.push_back(std::move(synthetic));
        }
        report.added_counts[label] = needed;
    }
    report.smote_percentage =
        static_cast<double>(report.total_added()) / static_cast<double>(train.size());
    return {Dataset(train.name(), std::move(rows)), std::move(report)};
}

}  // namespace coeye
