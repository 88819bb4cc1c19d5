#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpgda/dataset.hpp"

namespace dpgda {

enum class SamplerKind { ros, smote, jitter };

struct SamplerSpec {
    SamplerKind kind = SamplerKind::ros;
    std::size_t k_neighbors = 5;     // smote
    double sigma_fraction = 0.3;     // jitter, of per-feature range
    std::uint64_t seed = 0;
};

/// m exact copies of minority rows, drawn uniformly with replacement.
std::vector<std::vector<double>> ros(const Dataset& train, int minority_class, std::size_t m,
                                     std::uint64_t seed);

/// Interpolation between a random minority sample and one of its k nearest
/// minority neighbors (Euclidean, brute force).
std::vector<std::vector<double>> smote(const Dataset& train, int minority_class, std::size_t m,
                                       std::size_t k, std::uint64_t seed);

/// Minority sample plus unclipped Gaussian noise with per-feature sigma =
/// sigma_fraction * feature range. Deliberately able to extrapolate
/// outside valid ranges; exists to exercise the violation auditor.
std::vector<std::vector<double>> jitter(const Dataset& train, int minority_class, std::size_t m,
                                        double sigma_fraction, std::uint64_t seed);

std::vector<std::vector<double>> run_sampler(const SamplerSpec& spec, const Dataset& train,
                                             int minority_class, std::size_t m);

SamplerKind sampler_kind_from_name(const std::string& name);
std::string sampler_kind_name(SamplerKind kind);

}  // namespace dpgda
