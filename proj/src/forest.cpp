#include "dpgda/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dpgda/metrics.hpp"

namespace dpgda {

double gini(std::span<const std::size_t> class_counts) {
    std::size_t total = 0;
    for (std::size_t c : class_counts) total += c;
    if (total == 0) throw Error("gini: zero total count");
    double g = 1.0;
    for (std::size_t c : class_counts) {
        double p = static_cast<double>(c) / static_cast<double>(total);
        g -= p * p;
    }
    return g;
}

namespace {

struct Builder {
    const Dataset& data;
    const ForestConfig& cfg;
    std::size_t n_classes;
    std::size_t d;
    std::size_t features_per_split;
    Rng rng;
    Tree tree;

    Builder(const Dataset& data, const ForestConfig& cfg, std::size_t n_classes,
            std::uint64_t seed)
        : data(data),
          cfg(cfg),
          n_classes(n_classes),
          d(data.n_features()),
          features_per_split(cfg.features_per_split == 0
                                 ? static_cast<std::size_t>(
                                       std::ceil(std::sqrt(static_cast<double>(data.n_features()))))
                                 : std::min(cfg.features_per_split, data.n_features())),
          rng(seed) {}

    std::vector<std::size_t> count(const std::vector<std::size_t>& rows) const {
        std::vector<std::size_t> counts(n_classes, 0);
        for (std::size_t i : rows) counts[static_cast<std::size_t>(data.labels[i])]++;
        return counts;
    }

    int make_leaf(const std::vector<std::size_t>& counts) {
        TreeNode node;
        node.class_counts = counts;
        node.predicted = static_cast<int>(
            std::max_element(counts.begin(), counts.end()) - counts.begin());
        tree.nodes.push_back(std::move(node));
        return static_cast<int>(tree.nodes.size() - 1);
    }

    // Best (threshold, weighted child impurity) for one feature, or nullopt
    // when no split keeps both children at min_samples_leaf.
    struct SplitChoice {
        std::size_t feature;
        double threshold;
        double impurity;
    };

    bool try_feature(std::size_t f, const std::vector<std::size_t>& rows, SplitChoice& out) const {
        std::vector<std::pair<double, int>> vals;
        vals.reserve(rows.size());
        for (std::size_t i : rows)
            vals.emplace_back(data.row(i)[f], data.labels[i]);
        std::sort(vals.begin(), vals.end());
        if (vals.front().first == vals.back().first) return false;

        const std::size_t n = vals.size();
        std::vector<std::size_t> left(n_classes, 0), right(n_classes, 0);
        for (auto& [v, y] : vals) right[static_cast<std::size_t>(y)]++;

        bool found = false;
        double best_imp = std::numeric_limits<double>::infinity();
        double best_thr = 0.0;
        std::size_t n_left = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            auto y = static_cast<std::size_t>(vals[i].second);
            left[y]++;
            right[y]--;
            n_left++;
            if (vals[i].first == vals[i + 1].first) continue;
            std::size_t n_right = n - n_left;
            if (n_left < cfg.min_samples_leaf || n_right < cfg.min_samples_leaf) continue;
            double imp = (static_cast<double>(n_left) * gini(left) +
                          static_cast<double>(n_right) * gini(right)) /
                         static_cast<double>(n);
            if (imp < best_imp - 1e-15) {
                best_imp = imp;
                best_thr = vals[i].first + 0.5 * (vals[i + 1].first - vals[i].first);
                found = true;
            }
        }
        if (!found) return false;
        out = {f, best_thr, best_imp};
        return true;
    }

    int build(const std::vector<std::size_t>& rows, std::size_t depth) {
        auto counts = count(rows);
        std::size_t present = 0;
        for (std::size_t c : counts) present += (c > 0);
        if (present <= 1 || depth >= cfg.max_depth || rows.size() < 2 * cfg.min_samples_leaf)
            return make_leaf(counts);

        // candidate feature subset, sampled without replacement
        std::vector<std::size_t> feats(d);
        std::iota(feats.begin(), feats.end(), 0);
        rng.shuffle(feats);
        feats.resize(features_per_split);
        std::sort(feats.begin(), feats.end());

        double parent_imp = gini(counts);
        bool have = false;
        SplitChoice best{};
        for (std::size_t f : feats) {
            SplitChoice c{};
            if (!try_feature(f, rows, c)) continue;
            // ties break to the lowest feature index, then lowest threshold
            if (!have || c.impurity < best.impurity - 1e-15) {
                best = c;
                have = true;
            }
        }
        if (!have || best.impurity >= parent_imp - 1e-15) return make_leaf(counts);

        std::vector<std::size_t> lrows, rrows;
        for (std::size_t i : rows)
            (data.row(i)[best.feature] <= best.threshold ? lrows : rrows).push_back(i);

        TreeNode node;
        node.feature = static_cast<int>(best.feature);
        node.threshold = best.threshold;
        node.class_counts = counts;
        tree.nodes.push_back(std::move(node));
        int id = static_cast<int>(tree.nodes.size() - 1);
        int left = build(lrows, depth + 1);
        int right = build(rrows, depth + 1);
        tree.nodes[static_cast<std::size_t>(id)].left = left;
        tree.nodes[static_cast<std::size_t>(id)].right = right;
        return id;
    }
};

// Children are appended after the parent, so node 0 being the root requires
// building the root first; Builder::build does exactly that.
Tree build_tree(const Dataset& data, const ForestConfig& cfg, std::size_t n_classes,
                std::uint64_t seed) {
    Builder b(data, cfg, n_classes, seed);
    std::vector<std::size_t> rows;
    if (cfg.bootstrap) {
        auto n_draw = static_cast<std::size_t>(
            std::llround(cfg.bootstrap_fraction * static_cast<double>(data.n_rows())));
        n_draw = std::max<std::size_t>(n_draw, 1);
        rows.reserve(n_draw);
        for (std::size_t i = 0; i < n_draw; ++i)
            rows.push_back(b.rng.uniform_index(data.n_rows()));
        std::sort(rows.begin(), rows.end());
    } else {
        rows.resize(data.n_rows());
        std::iota(rows.begin(), rows.end(), 0);
    }
    b.build(rows, 0);
    return std::move(b.tree);
}

}  // namespace

Forest train_forest(const Dataset& train, const ForestConfig& cfg) {
    train.validate();
    if (train.n_classes() < 2) throw Error("train_forest requires at least two classes");
    if (train.n_rows() < 2 * cfg.min_samples_leaf)
        throw Error("train_forest: not enough samples");
    if (cfg.n_trees < 1) throw Error("train_forest: n_trees must be >= 1");

    Forest forest;
    forest.config = cfg;
    forest.stats = feature_stats(train);
    forest.n_classes = train.n_classes();
    forest.n_features = train.n_features();
    forest.trees.reserve(cfg.n_trees);
    for (std::size_t t = 0; t < cfg.n_trees; ++t) {
        // per-tree seed derived by tree index so parallel builds would agree
        forest.trees.push_back(build_tree(train, cfg, forest.n_classes,
                                          derive_seed(cfg.seed, 0x7265ULL, t)));
    }
    return forest;
}

std::size_t route_to_leaf(const Tree& tree, std::span<const double> x) {
    std::size_t id = 0;
    while (!tree.nodes[id].is_leaf()) {
        const TreeNode& n = tree.nodes[id];
        id = static_cast<std::size_t>(
            x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return id;
}

int tree_predict(const Tree& tree, std::span<const double> x) {
    return tree.nodes[route_to_leaf(tree, x)].predicted;
}

int predict(const Forest& forest, std::span<const double> x) {
    if (x.size() != forest.n_features) throw Error("predict: feature dimension mismatch");
    std::vector<std::size_t> votes(forest.n_classes, 0);
    for (const Tree& t : forest.trees) votes[static_cast<std::size_t>(tree_predict(t, x))]++;
    return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

std::vector<SplitStep> decision_path(const Tree& tree, std::span<const double> x) {
    std::vector<SplitStep> path;
    std::size_t id = 0;
    while (!tree.nodes[id].is_leaf()) {
        const TreeNode& n = tree.nodes[id];
        bool leq = x[static_cast<std::size_t>(n.feature)] <= n.threshold;
        path.push_back({static_cast<std::size_t>(n.feature), leq, n.threshold});
        id = static_cast<std::size_t>(leq ? n.left : n.right);
    }
    return path;
}

double surrogate_f1(const Forest& forest, const Dataset& test) {
    std::vector<int> pred(test.n_rows());
    for (std::size_t i = 0; i < test.n_rows(); ++i) pred[i] = predict(forest, test.row(i));
    return macro_metrics(test.labels, pred, test.n_classes()).f1;
}

nlohmann::json forest_to_json(const Forest& forest) {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["n_classes"] = forest.n_classes;
    doc["n_features"] = forest.n_features;
    doc["config"] = {{"n_trees", forest.config.n_trees},
                     {"max_depth", forest.config.max_depth},
                     {"min_samples_leaf", forest.config.min_samples_leaf},
                     {"bootstrap_fraction", forest.config.bootstrap_fraction},
                     {"bootstrap", forest.config.bootstrap},
                     {"features_per_split", forest.config.features_per_split},
                     {"seed", forest.config.seed}};
    doc["stats"] = {{"min", forest.stats.min}, {"max", forest.stats.max}};
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& t : forest.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& n : t.nodes) {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"predicted", n.predicted},
                             {"counts", n.class_counts}});
        }
        trees.push_back(std::move(nodes));
    }
    doc["trees"] = std::move(trees);
    return doc;
}

Forest forest_from_json(const nlohmann::json& doc) {
    if (doc.value("format_version", 0) != 1) throw Error("unsupported forest format version");
    Forest forest;
    forest.n_classes = doc.at("n_classes").get<std::size_t>();
    forest.n_features = doc.at("n_features").get<std::size_t>();
    const auto& c = doc.at("config");
    forest.config.n_trees = c.at("n_trees").get<std::size_t>();
    forest.config.max_depth = c.at("max_depth").get<std::size_t>();
    forest.config.min_samples_leaf = c.at("min_samples_leaf").get<std::size_t>();
    forest.config.bootstrap_fraction = c.at("bootstrap_fraction").get<double>();
    forest.config.bootstrap = c.at("bootstrap").get<bool>();
    forest.config.features_per_split = c.at("features_per_split").get<std::size_t>();
    forest.config.seed = c.at("seed").get<std::uint64_t>();
    forest.stats.min = doc.at("stats").at("min").get<std::vector<double>>();
    forest.stats.max = doc.at("stats").at("max").get<std::vector<double>>();
    forest.stats.range.resize(forest.stats.min.size());
    for (std::size_t j = 0; j < forest.stats.min.size(); ++j)
        forest.stats.range[j] = forest.stats.max[j] - forest.stats.min[j];
    for (const auto& tnodes : doc.at("trees")) {
        Tree t;
        for (const auto& jn : tnodes) {
            TreeNode n;
            n.feature = jn.at("feature").get<int>();
            n.threshold = jn.at("threshold").get<double>();
            n.left = jn.at("left").get<int>();
            n.right = jn.at("right").get<int>();
            n.predicted = jn.at("predicted").get<int>();
            n.class_counts = jn.at("counts").get<std::vector<std::size_t>>();
            t.nodes.push_back(std::move(n));
        }
        forest.trees.push_back(std::move(t));
    }
    return forest;
}

}  // namespace dpgda
