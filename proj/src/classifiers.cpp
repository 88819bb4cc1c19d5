#include "dpgda/classifiers.hpp"

#include <algorithm>
#include <cmath>

namespace dpgda {

namespace {

std::vector<double> scale_row(std::span<const double> x, const FeatureStats& st) {
    std::vector<double> out(x.size());
    for (std::size_t f = 0; f < x.size(); ++f)
        out[f] = st.range[f] > 0.0 ? (x[f] - st.min[f]) / st.range[f] : 0.0;
    return out;
}

int argmax_lowest_tie(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return static_cast<int>(best);
}

}  // namespace

ClassifierModel train_classifier(const ClassifierSpec& spec, const Dataset& train) {
    if (train.n_classes() < 2) throw Error("train_classifier requires >= 2 classes");
    ClassifierModel model;
    model.spec = spec;
    model.n_classes = train.n_classes();
    model.n_features = train.n_features();

    switch (spec.kind) {
        case ClassifierKind::decision_tree: {
            ForestConfig cfg;
            cfg.n_trees = 1;
            cfg.max_depth = spec.tree_max_depth;
            cfg.min_samples_leaf = 1;
            cfg.bootstrap = false;
            cfg.features_per_split = train.n_features();
            model.tree = train_forest(train, cfg);
            break;
        }
        case ClassifierKind::knn: {
            model.scaling = feature_stats(train);
            model.train_labels = train.labels;
            model.train_scaled.reserve(train.n_rows() * train.n_features());
            for (std::size_t i = 0; i < train.n_rows(); ++i) {
                auto s = scale_row(train.row(i), model.scaling);
                model.train_scaled.insert(model.train_scaled.end(), s.begin(), s.end());
            }
            break;
        }
        case ClassifierKind::logistic_regression: {
            model.scaling = feature_stats(train);
            const std::size_t d = train.n_features();
            const std::size_t n = train.n_rows();
            std::vector<double> scaled(n * d);
            for (std::size_t i = 0; i < n; ++i) {
                auto s = scale_row(train.row(i), model.scaling);
                std::copy(s.begin(), s.end(), scaled.begin() + static_cast<long>(i * d));
            }
            model.weights.assign(model.n_classes, std::vector<double>(d + 1, 0.0));
            // one-vs-rest full-batch gradient descent
            for (std::size_t c = 0; c < model.n_classes; ++c) {
                std::vector<double>& w = model.weights[c];
                std::vector<double> grad(d + 1);
                for (std::size_t epoch = 0; epoch < spec.logreg_epochs; ++epoch) {
                    std::fill(grad.begin(), grad.end(), 0.0);
                    for (std::size_t i = 0; i < n; ++i) {
                        const double* x = scaled.data() + i * d;
                        double z = w[d];
                        for (std::size_t f = 0; f < d; ++f) z += w[f] * x[f];
                        double p = 1.0 / (1.0 + std::exp(-z));
                        double y = (train.labels[i] == static_cast<int>(c)) ? 1.0 : 0.0;
                        double err = p - y;
                        for (std::size_t f = 0; f < d; ++f) grad[f] += err * x[f];
                        grad[d] += err;
                    }
                    double inv_n = 1.0 / static_cast<double>(n);
                    for (std::size_t f = 0; f < d; ++f)
                        w[f] -= spec.logreg_learning_rate * (grad[f] * inv_n + spec.logreg_l2 * w[f]);
                    w[d] -= spec.logreg_learning_rate * grad[d] * inv_n;
                }
            }
            break;
        }
    }
    return model;
}

std::vector<int> predict_all(const ClassifierModel& model, const Dataset& test) {
    if (test.n_features() != model.n_features)
        throw Error("predict_all: feature dimension mismatch");
    std::vector<int> pred(test.n_rows());
    const std::size_t d = model.n_features;

    switch (model.spec.kind) {
        case ClassifierKind::decision_tree: {
            for (std::size_t i = 0; i < test.n_rows(); ++i)
                pred[i] = predict(model.tree, test.row(i));
            break;
        }
        case ClassifierKind::knn: {
            const std::size_t n_train = model.train_labels.size();
            const std::size_t k = std::min(model.spec.knn_k, n_train);
            for (std::size_t i = 0; i < test.n_rows(); ++i) {
                auto q = scale_row(test.row(i), model.scaling);
                std::vector<std::pair<double, std::size_t>> dist(n_train);
                for (std::size_t j = 0; j < n_train; ++j) {
                    const double* x = model.train_scaled.data() + j * d;
                    double sq = 0.0;
                    for (std::size_t f = 0; f < d; ++f) {
                        double delta = q[f] - x[f];
                        sq += delta * delta;
                    }
                    dist[j] = {sq, j};  // index tie-break keeps this deterministic
                }
                std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k), dist.end());
                std::vector<double> votes(model.n_classes, 0.0);
                for (std::size_t j = 0; j < k; ++j)
                    votes[static_cast<std::size_t>(model.train_labels[dist[j].second])] += 1.0;
                pred[i] = argmax_lowest_tie(votes);
            }
            break;
        }
        case ClassifierKind::logistic_regression: {
            for (std::size_t i = 0; i < test.n_rows(); ++i) {
                auto x = scale_row(test.row(i), model.scaling);
                std::vector<double> scores(model.n_classes);
                for (std::size_t c = 0; c < model.n_classes; ++c) {
                    const std::vector<double>& w = model.weights[c];
                    double z = w[d];
                    for (std::size_t f = 0; f < d; ++f) z += w[f] * x[f];
                    scores[c] = z;
                }
                pred[i] = argmax_lowest_tie(scores);
            }
            break;
        }
    }
    return pred;
}

ClassifierKind classifier_kind_from_name(const std::string& name) {
    if (name == "decision_tree" || name == "tree") return ClassifierKind::decision_tree;
    if (name == "knn") return ClassifierKind::knn;
    if (name == "logistic_regression" || name == "logreg")
        return ClassifierKind::logistic_regression;
    throw Error("unknown classifier: " + name);
}

std::string classifier_kind_name(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::decision_tree: return "decision_tree";
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::logistic_regression: return "logistic_regression";
    }
    return "?";
}

}  // namespace dpgda
