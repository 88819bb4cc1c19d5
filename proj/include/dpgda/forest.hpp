#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dpgda/dataset.hpp"

#include "json.hpp"

namespace dpgda {

/// One node of a CART tree. Internal nodes test value <= threshold
/// (boundary routes left); leaves carry per-class sample counts.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int predicted = -1;
    std::vector<std::size_t> class_counts;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // node 0 is the root
};

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t max_depth = 8;
    std::size_t min_samples_leaf = 2;
    double bootstrap_fraction = 1.0;  // with replacement
    bool bootstrap = true;
    std::size_t features_per_split = 0;  // 0 => ceil(sqrt(d))
    std::uint64_t seed = 0;
};

/// A single step along a decision path: value <= threshold when leq,
/// value > threshold otherwise.
struct SplitStep {
    std::size_t feature;
    bool leq;
    double threshold;

    bool operator==(const SplitStep&) const = default;
};

struct Forest {
    std::vector<Tree> trees;
    ForestConfig config;
    FeatureStats stats;  // of the training data
    std::size_t n_classes = 0;
    std::size_t n_features = 0;
};

/// Gini impurity 1 - sum p_i^2 over a class-count vector.
double gini(std::span<const std::size_t> class_counts);

Forest train_forest(const Dataset& train, const ForestConfig& cfg);

/// Index of the leaf node x routes to.
std::size_t route_to_leaf(const Tree& tree, std::span<const double> x);

int tree_predict(const Tree& tree, std::span<const double> x);

/// Majority vote over trees; ties break to the lowest class id.
int predict(const Forest& forest, std::span<const double> x);

/// Ordered predicates along x's route in one tree (root to leaf).
std::vector<SplitStep> decision_path(const Tree& tree, std::span<const double> x);

/// Macro F1 of the forest's predictions on a test set.
double surrogate_f1(const Forest& forest, const Dataset& test);

nlohmann::json forest_to_json(const Forest& forest);
Forest forest_from_json(const nlohmann::json& doc);

}  // namespace dpgda
