#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dpgda/forest.hpp"

namespace dpgda {

/// Axis-aligned split predicate (feature, op, threshold) with the
/// threshold quantized once at node-key creation. op is <= when leq.
struct Predicate {
    std::size_t feature;
    bool leq;
    double threshold;

    auto operator<=>(const Predicate&) const = default;
};

double quantize(double value, int decimals);

/// Direction-aware threshold quantization: '<=' rounds up, '>' rounds
/// down, keeping quantized predicates implied by their exact originals.
double quantize_outward(double value, int decimals, bool leq);

/// Decision Predicate Graph: predicate nodes plus one leaf node per class,
/// directed edges weighted by (tree, sample) traversal counts.
struct DPGraph {
    std::vector<Predicate> predicates;  // node ids 0..predicates.size()-1
    std::size_t n_classes = 0;          // leaf node id = predicates.size() + class
    int quantize_decimals = 2;
    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> edges;

    std::size_t n_nodes() const { return predicates.size() + n_classes; }
    std::size_t leaf_node(std::size_t cls) const { return predicates.size() + cls; }
    bool is_leaf_node(std::size_t id) const { return id >= predicates.size(); }
};

struct Interval {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    bool contains(double v) const { return v >= lower && v <= upper; }
    bool operator==(const Interval&) const = default;
};

enum class BoundSide { lower, upper };

/// Per-class feasible boxes derived from predicates on class-terminating
/// paths. Classes with no observed paths are absent from the map.
struct ClassBounds {
    std::map<int, std::vector<Interval>> per_class;  // vectors of length d
    std::size_t n_features = 0;
};

struct BoundViolation {
    std::size_t feature;
    BoundSide side;

    bool operator==(const BoundViolation&) const = default;
};

DPGraph build_dpg(const Forest& forest, const Dataset& train, int quantize_decimals = 2);

/// min_support is a fraction of class-c paths a predicate must appear on
/// to contribute; 0 keeps everything (the enclosure-safe default).
ClassBounds extract_class_bounds(const DPGraph& dpg, const Forest& forest, const Dataset& train,
                                 double min_support = 0.0);

struct CheckResult {
    bool satisfied;
    std::vector<BoundViolation> violated;
};

CheckResult check_bounds(const ClassBounds& bounds, int cls, std::span<const double> x);

struct ConstraintMetadata {
    int quantize_decimals = 2;
    double min_support = 0.0;
    std::uint64_t forest_seed = 0;
};

nlohmann::json export_constraints(const ClassBounds& bounds,
                                  const std::vector<std::string>& feature_names,
                                  const std::vector<std::string>& class_names,
                                  const ConstraintMetadata& meta);

/// Inverse of export_constraints; name order comes from the given schemas.
ClassBounds import_constraints(const nlohmann::json& doc,
                               const std::vector<std::string>& feature_names,
                               const std::vector<std::string>& class_names);

std::string dpg_to_dot(const DPGraph& dpg, const std::vector<std::string>& feature_names,
                       const std::vector<std::string>& class_names);

}  // namespace dpgda
