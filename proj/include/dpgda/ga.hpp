#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpgda/dpg.hpp"

namespace dpgda {

struct FitnessWeights {
    double adherence = 2.0;  // w1
    double distance = 1.0;   // w2
    double sparsity = 3.0;   // w3, applied to (1 - S)

    double max_fitness() const { return adherence + distance + sparsity; }
};

struct GAConfig {
    std::size_t population_size = 50;
    std::size_t max_generations = 100;
    std::size_t plateau_patience = 10;
    double plateau_epsilon = 1e-9;
    std::size_t tournament_size = 3;
    double crossover_rate = 0.9;
    double mutation_sigma_fraction = 0.1;    // of per-feature bound width
    std::size_t elitism_count = 1;
    double sparsity_epsilon_fraction = 1e-6;  // of feature range
    std::size_t retries_on_infeasible = 3;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Candidate {
    std::vector<double> x;
    double fitness = 0.0;
    double validity = 0.0;   // V: 0 or 1
    double adherence = 0.0;  // A in [0,1]
    double distance = 0.0;   // D in [0,1]
    double sparsity = 0.0;   // S in [0,1]
};

struct TraceRecord {
    std::size_t generation = 0;
    Candidate best;
    std::vector<double> delta;  // vs previous generation's best (gen 0: vs query)
    std::vector<BoundViolation> violated;
};

/// Composite fitness: V * (w1*A + w2*D + w3*(1-S)). V gates on the
/// surrogate predicting cls; A is the satisfied fraction of finite bound
/// sides; D is the range-scaled Euclidean distance over sqrt(d), capped at
/// 1; S is the epsilon-tolerant l0 change fraction.
Candidate evaluate_fitness(std::span<const double> x_a, std::span<const double> x_q,
                           const ClassBounds& bounds, int cls, const Forest& forest,
                           const FitnessWeights& w, const FeatureStats& stats,
                           double sparsity_epsilon_fraction = 1e-6);

struct EvolveResult {
    std::vector<double> accepted;
    std::vector<TraceRecord> trace;
};

EvolveResult evolve(std::span<const double> query, int cls, const ClassBounds& bounds,
                    const Forest& forest, const GAConfig& cfg, const FitnessWeights& w,
                    const FeatureStats& stats);

struct AugmentConfig {
    ForestConfig forest;
    int quantize_decimals = 2;
    double min_support = 0.0;
    double holdout_fraction = 0.8;  // surrogate trains on this share of train
    GAConfig ga;
    FitnessWeights weights;
};

struct AugmentResult {
    Dataset augmented;
    std::vector<std::vector<TraceRecord>> traces;  // one per synthetic sample
    nlohmann::json constraints;
    std::size_t n_added = 0;
    bool level_already_met = false;
    double surrogate_holdout_f1 = 0.0;
    std::size_t n_bounds_violations = 0;  // post-hoc recheck of accepted rows
};

/// Required synthetic count for a target minority proportion.
std::size_t required_synthetic_count(std::size_t n_minority, std::size_t n_total, double level);

/// Full DPG-da pipeline on one training set: internal holdout, surrogate
/// forest, DPG class bounds, one GA evolution per query sample.
AugmentResult augment_dataset(const Dataset& train, int minority_class, double level,
                              const AugmentConfig& cfg, std::uint64_t seed);

nlohmann::json trace_to_json(const std::vector<TraceRecord>& trace,
                             const std::vector<std::string>& feature_names,
                             std::span<const double> query);
std::vector<TraceRecord> trace_from_json(const nlohmann::json& doc);
std::string trace_to_csv(const std::vector<TraceRecord>& trace,
                         const std::vector<std::string>& feature_names);

}  // namespace dpgda
