#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include "coeye/data.hpp"

namespace coeye {

struct SmoteReport {
    std::map<int, std::size_t> original_counts;
    std::map<int, std::size_t> added_counts;
    // total added / total original
    double smote_percentage = 0.0;

    std::size_t total_added() const;
};

struct SmoteResult {
    Dataset data;
    SmoteReport report;
};

// Tops every minority class with at least two members up to the majority
// count. Synthetic rows follow all originals. Distances are on raw values.
SmoteResult smote(const Dataset& train, int k = 5, std::uint64_t seed = 42);

// Class counts keyed by label.
std::map<int, std::size_t> class_counts(const Dataset& data);

}  // namespace coeye
