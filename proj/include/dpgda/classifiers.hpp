#pragma once

#include <string>
#include <vector>

#include "dpgda/forest.hpp"

namespace dpgda {

enum class ClassifierKind { decision_tree, knn, logistic_regression };

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::decision_tree;
    std::size_t tree_max_depth = 8;
    std::size_t knn_k = 5;
    double logreg_learning_rate = 0.1;
    std::size_t logreg_epochs = 200;
    double logreg_l2 = 1e-4;
};

/// Downstream classifier model. knn and logistic regression consume
/// range-scaled features (train-fitted); the tree uses raw values.
struct ClassifierModel {
    ClassifierSpec spec;
    std::size_t n_classes = 0;
    FeatureStats scaling;                  // knn, logreg
    Forest tree;                           // decision_tree (single CART tree)
    std::vector<double> train_scaled;      // knn memorized training matrix
    std::vector<int> train_labels;         // knn
    std::size_t n_features = 0;
    std::vector<std::vector<double>> weights;  // logreg: per class, d + bias
};

ClassifierModel train_classifier(const ClassifierSpec& spec, const Dataset& train);
std::vector<int> predict_all(const ClassifierModel& model, const Dataset& test);

ClassifierKind classifier_kind_from_name(const std::string& name);
std::string classifier_kind_name(ClassifierKind kind);

}  // namespace dpgda
