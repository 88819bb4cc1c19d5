#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpgda/constraints.hpp"

namespace dpgda {

enum class FeatureDist { normal, uniform };

/// One generated feature: values are drawn from the distribution and kept
/// strictly inside [gen_lo, gen_hi], which in turn sits inside the shipped
/// domain rule [rule_lo, rule_hi] with a margin.
struct FeatureGenSpec {
    std::string name;
    FeatureDist dist = FeatureDist::normal;
    double mean = 0.0;
    double stddev = 1.0;
    double gen_lo = 0.0;
    double gen_hi = 1.0;
    double rule_lo = 0.0;
    double rule_hi = 1.0;
    double label_weight = 0.0;  // contribution to the class score
};

struct DomainConfig {
    std::string name;
    std::size_t n_samples = 1000;
    double minority_fraction = 0.25;  // e.g. 3:1 -> 0.25
    double label_noise = 0.5;         // stddev of noise added to the class score
    std::vector<FeatureGenSpec> features;

    std::vector<DomainRule> rules() const;
};

enum class ShapeKind { subclus, clover, paw };

std::vector<std::string> builtin_domain_names();
DomainConfig builtin_domain(const std::string& name);

/// Reads a domain manifest: top-level name / n_samples /
/// minority_fraction / label_noise plus one [[features]] table per
/// feature mirroring FeatureGenSpec.
DomainConfig domain_config_from_toml(const std::string& path);

/// Seed-deterministic generation; labels are assigned by thresholding a
/// noisy linear score at the quantile matching minority_fraction, so the
/// configured ratio is hit exactly and the boundary is learnable but noisy.
Dataset generate_domain(const DomainConfig& cfg, std::uint64_t seed);

/// 2-D imbalanced shape datasets; minority occupies the named shape,
/// majority is uniform over the [0,100]^2 bounding box (overlap intended).
Dataset generate_shape(ShapeKind kind, std::size_t n, double majority_ratio, std::uint64_t seed);

ShapeKind shape_kind_from_name(const std::string& name);
std::vector<DomainRule> shape_rules();

nlohmann::json domain_meta(const DomainConfig& cfg, std::uint64_t seed);

}  // namespace dpgda
