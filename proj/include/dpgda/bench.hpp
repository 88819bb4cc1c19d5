#pragma once

#include <map>
#include <string>
#include <vector>

#include "dpgda/classifiers.hpp"
#include "dpgda/constraints.hpp"
#include "dpgda/ga.hpp"
#include "dpgda/samplers.hpp"

namespace dpgda {

enum class BenchMethod { none, dpgda, ros, smote, jitter };

BenchMethod bench_method_from_name(const std::string& name);
std::string bench_method_name(BenchMethod method);

struct BenchDataset {
    std::string id;
    Dataset data;
    std::vector<DomainRule> rules;  // may be empty
};

struct BenchConfig {
    std::vector<double> levels{0.15, 0.30, 0.50};
    std::size_t reps = 10;
    std::uint64_t master_seed = 0;
    std::size_t jobs = 1;
    double train_fraction = 0.8;
    bool include_baseline = true;  // no-augmentation control rows at level 0
    AugmentConfig pipeline;        // dpgda settings
    std::size_t smote_k = 5;
    double jitter_sigma_fraction = 0.3;
    std::vector<ClassifierSpec> classifiers = {
        {ClassifierKind::decision_tree}, {ClassifierKind::knn},
        {ClassifierKind::logistic_regression}};
};

struct BenchResult {
    std::string dataset;
    std::string method;
    double level = 0.0;
    std::size_t rep = 0;
    std::string classifier;
    double macro_f1 = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double runtime_seconds = 0.0;   // augmentation wall clock
    double violation_rate = 0.0;    // synth rows vs the dataset's rules
    std::size_t bounds_violations = 0;  // dpgda post-hoc bound recheck
    bool failed = false;
    std::string error;
};

/// Full protocol: stratified split per (dataset, rep), augmentation of the
/// train partition only, downstream classifiers on the untouched test
/// partition. Deterministic for a fixed master seed regardless of jobs.
std::vector<BenchResult> run_benchmark(const std::vector<BenchDataset>& datasets,
                                       const std::vector<BenchMethod>& methods,
                                       const BenchConfig& cfg);

std::string results_to_csv(const std::vector<BenchResult>& results);
std::vector<BenchResult> results_from_csv(const std::string& path);

struct Aggregate {
    double mean_f1 = 0.0;
    double mean_violation_rate = 0.0;
    double mean_runtime = 0.0;
    std::size_t n_rows = 0;
};

/// Mean over reps, levels and classifiers per (dataset, method); failed
/// rows are excluded.
std::map<std::pair<std::string, std::string>, Aggregate> aggregate_by_dataset_method(
    const std::vector<BenchResult>& results);

struct AblationRow {
    FitnessWeights weights;
    double mean_f1 = 0.0;
};

/// All 3 x 3 x 3 weight combinations over {1, 2, 3}, ranked by mean macro
/// F1 (descending; ties break to the lexicographically smaller triple).
std::vector<AblationRow> ablation_grid(const std::vector<BenchDataset>& datasets,
                                       const BenchConfig& cfg);

std::string ablation_to_csv(const std::vector<AblationRow>& rows);

}  // namespace dpgda
