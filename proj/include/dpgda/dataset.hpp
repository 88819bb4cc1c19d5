#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpgda/common.hpp"

namespace dpgda {

/// Immutable-after-construction tabular dataset: row-major numeric feature
/// matrix plus contiguous integer class labels.
struct Dataset {
    std::vector<double> values;  // n_rows * n_features, row-major
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;

    std::size_t n_rows() const { return labels.size(); }
    std::size_t n_features() const { return feature_names.size(); }
    std::size_t n_classes() const { return class_names.size(); }

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * n_features(), n_features()};
    }

    void add_row(std::span<const double> x, int label) {
        values.insert(values.end(), x.begin(), x.end());
        labels.push_back(label);
    }

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(n_classes(), 0);
        for (int y : labels) counts[static_cast<std::size_t>(y)]++;
        return counts;
    }

    /// Sanity checks the type invariants; throws Error on violation.
    void validate() const;
};

struct SplitSpec {
    double train_fraction = 0.8;
    double holdout_fraction = 0.8;  // applied inside train by consumers
    std::uint64_t seed = 0;
};

struct FeatureStats {
    std::vector<double> min;
    std::vector<double> max;
    std::vector<double> range;  // max - min, elementwise
};

/// Loads a headered CSV. label_column may be a header name, a 0-based
/// column index, or empty (last column). Labels are re-encoded to
/// contiguous ids in first-appearance order; original names are kept.
Dataset load_csv(const std::string& path, const std::string& label_column = "");

void write_csv(const Dataset& ds, const std::string& path);

/// Stratified, seed-deterministic split. Per-class train allocation is
/// ceil(fraction * n_c), clamped so both partitions stay non-empty.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed);

inline std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitSpec& spec) {
    return stratified_split(ds, spec.train_fraction, spec.seed);
}

FeatureStats feature_stats(const Dataset& ds);

/// Majority-class count over minority-class count; always >= 1.
double imbalance_ratio(const Dataset& ds);

}  // namespace dpgda
