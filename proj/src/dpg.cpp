#include "dpgda/dpg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace dpgda {

double quantize(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

double quantize_outward(double value, int decimals, bool leq) {
    // '<=' thresholds round up and '>' thresholds round down, so the
    // quantized predicate is implied by the exact one and boxes built from
    // quantized thresholds still enclose every routed sample
    double scale = std::pow(10.0, decimals);
    double scaled = value * scale;
    return (leq ? std::ceil(scaled) : std::floor(scaled)) / scale;
}

DPGraph build_dpg(const Forest& forest, const Dataset& train, int quantize_decimals) {
    if (train.n_rows() == 0) throw Error("build_dpg: empty training set");
    if (train.n_features() != forest.n_features)
        throw Error("build_dpg: dataset does not match forest dimensionality");

    DPGraph dpg;
    dpg.n_classes = forest.n_classes;
    dpg.quantize_decimals = quantize_decimals;

    std::map<Predicate, std::size_t> node_of;
    auto node_id = [&](const Predicate& p) {
        auto [it, fresh] = node_of.try_emplace(p, node_of.size());
        return it->second;
    };

    // First pass assigns node ids; edge endpoints reference the final layout
    // (predicates first, leaves after), so edges are collected on raw ids and
    // leaf ids are resolved once the predicate count is known.
    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> raw_edges;
    constexpr std::size_t leaf_tag = static_cast<std::size_t>(1) << 63;
    for (const Tree& tree : forest.trees) {
        for (std::size_t i = 0; i < train.n_rows(); ++i) {
            auto x = train.row(i);
            auto path = decision_path(tree, x);
            int leaf_class = tree_predict(tree, x);
            std::size_t prev = leaf_tag;  // sentinel: no previous node yet
            for (const SplitStep& s : path) {
                Predicate p{s.feature, s.leq,
                            quantize_outward(s.threshold, quantize_decimals, s.leq)};
                std::size_t id = node_id(p);
                if (prev != leaf_tag) raw_edges[{prev, id}]++;
                prev = id;
            }
            std::size_t leaf = leaf_tag | static_cast<std::size_t>(leaf_class);
            if (prev != leaf_tag) raw_edges[{prev, leaf}]++;
        }
    }

    dpg.predicates.resize(node_of.size());
    for (const auto& [p, id] : node_of) dpg.predicates[id] = p;
    for (const auto& [e, w] : raw_edges) {
        auto resolve = [&](std::size_t id) {
            return (id & leaf_tag) ? dpg.leaf_node(id & ~leaf_tag) : id;
        };
        dpg.edges[{resolve(e.first), resolve(e.second)}] += w;
    }
    return dpg;
}

ClassBounds extract_class_bounds(const DPGraph& dpg, const Forest& forest, const Dataset& train,
                                 double min_support) {
    if (train.n_features() != forest.n_features)
        throw Error("extract_class_bounds: dataset does not match forest");
    const std::size_t d = forest.n_features;

    // per class: path count and per-predicate path-occurrence counts
    std::vector<std::uint64_t> class_paths(forest.n_classes, 0);
    std::vector<std::map<Predicate, std::uint64_t>> support(forest.n_classes);
    for (const Tree& tree : forest.trees) {
        for (std::size_t i = 0; i < train.n_rows(); ++i) {
            auto x = train.row(i);
            auto cls = static_cast<std::size_t>(tree_predict(tree, x));
            class_paths[cls]++;
            std::set<Predicate> on_path;  // count each predicate once per path
            for (const SplitStep& s : decision_path(tree, x))
                on_path.insert({s.feature, s.leq,
                                quantize_outward(s.threshold, dpg.quantize_decimals, s.leq)});
            for (const Predicate& p : on_path) support[cls][p]++;
        }
    }

    ClassBounds bounds;
    bounds.n_features = d;
    for (std::size_t c = 0; c < forest.n_classes; ++c) {
        if (class_paths[c] == 0) continue;
        auto threshold_count = min_support * static_cast<double>(class_paths[c]);
        std::vector<Interval> box(d);
        for (const auto& [p, cnt] : support[c]) {
            if (static_cast<double>(cnt) < threshold_count) continue;
            Interval& iv = box[p.feature];
            if (p.leq) {
                // loosest enclosing box: widest '<=' threshold wins
                if (!std::isfinite(iv.upper) || p.threshold > iv.upper) iv.upper = p.threshold;
            } else {
                if (!std::isfinite(iv.lower) || p.threshold < iv.lower) iv.lower = p.threshold;
            }
        }
        bounds.per_class[static_cast<int>(c)] = std::move(box);
    }
    if (bounds.per_class.empty()) throw Error("extract_class_bounds: no class paths observed");
    return bounds;
}

CheckResult check_bounds(const ClassBounds& bounds, int cls, std::span<const double> x) {
    auto it = bounds.per_class.find(cls);
    if (it == bounds.per_class.end())
        throw Error("check_bounds: unknown class id " + std::to_string(cls));
    if (x.size() != bounds.n_features) throw Error("check_bounds: dimension mismatch");
    CheckResult res{true, {}};
    for (std::size_t f = 0; f < x.size(); ++f) {
        const Interval& iv = it->second[f];
        if (x[f] < iv.lower) {
            res.satisfied = false;
            res.violated.push_back({f, BoundSide::lower});
        }
        if (x[f] > iv.upper) {
            res.satisfied = false;
            res.violated.push_back({f, BoundSide::upper});
        }
    }
    return res;
}

nlohmann::json export_constraints(const ClassBounds& bounds,
                                  const std::vector<std::string>& feature_names,
                                  const std::vector<std::string>& class_names,
                                  const ConstraintMetadata& meta) {
    if (feature_names.size() != bounds.n_features && !bounds.per_class.empty())
        throw Error("export_constraints: feature name count mismatch");
    nlohmann::json cb = nlohmann::json::object();
    for (const auto& [cls, box] : bounds.per_class) {
        if (static_cast<std::size_t>(cls) >= class_names.size())
            throw Error("export_constraints: class id out of range");
        nlohmann::json entry = nlohmann::json::object();
        for (std::size_t f = 0; f < box.size(); ++f) {
            nlohmann::json iv;
            iv["lower"] = std::isfinite(box[f].lower) ? nlohmann::json(box[f].lower)
                                                      : nlohmann::json(nullptr);
            iv["upper"] = std::isfinite(box[f].upper) ? nlohmann::json(box[f].upper)
                                                      : nlohmann::json(nullptr);
            entry[feature_names[f]] = std::move(iv);
        }
        cb[class_names[static_cast<std::size_t>(cls)]] = std::move(entry);
    }
    return {{"class_bounds", std::move(cb)},
            {"metadata",
             {{"quantize_decimals", meta.quantize_decimals},
              {"min_support", meta.min_support},
              {"forest_seed", meta.forest_seed}}}};
}

ClassBounds import_constraints(const nlohmann::json& doc,
                               const std::vector<std::string>& feature_names,
                               const std::vector<std::string>& class_names) {
    ClassBounds bounds;
    bounds.n_features = feature_names.size();
    const auto& cb = doc.at("class_bounds");
    for (auto it = cb.begin(); it != cb.end(); ++it) {
        auto cit = std::find(class_names.begin(), class_names.end(), it.key());
        if (cit == class_names.end())
            throw Error("import_constraints: unknown class name " + it.key());
        std::vector<Interval> box(bounds.n_features);
        for (auto fit = it->begin(); fit != it->end(); ++fit) {
            auto fnit = std::find(feature_names.begin(), feature_names.end(), fit.key());
            if (fnit == feature_names.end())
                throw Error("import_constraints: unknown feature name " + fit.key());
            Interval& iv = box[static_cast<std::size_t>(fnit - feature_names.begin())];
            if (!fit->at("lower").is_null()) iv.lower = fit->at("lower").get<double>();
            if (!fit->at("upper").is_null()) iv.upper = fit->at("upper").get<double>();
        }
        bounds.per_class[static_cast<int>(cit - class_names.begin())] = std::move(box);
    }
    return bounds;
}

std::string dpg_to_dot(const DPGraph& dpg, const std::vector<std::string>& feature_names,
                       const std::vector<std::string>& class_names) {
    std::ostringstream out;
    out << "digraph dpg {\n";
    char buf[128];
    for (std::size_t i = 0; i < dpg.predicates.size(); ++i) {
        const Predicate& p = dpg.predicates[i];
        std::snprintf(buf, sizeof buf, "%g", p.threshold);
        out << "  n" << i << " [shape=box,label=\"" << feature_names[p.feature]
            << (p.leq ? " <= " : " > ") << buf << "\"];\n";
    }
    for (std::size_t c = 0; c < dpg.n_classes; ++c) {
        out << "  n" << dpg.leaf_node(c) << " [shape=ellipse,label=\"" << class_names[c]
            << "\"];\n";
    }
    for (const auto& [e, w] : dpg.edges) {
        out << "  n" << e.first << " -> n" << e.second << " [label=\"" << w << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace dpgda
