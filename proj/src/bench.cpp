#include "dpgda/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "dpgda/metrics.hpp"

namespace dpgda {

BenchMethod bench_method_from_name(const std::string& name) {
    if (name == "none") return BenchMethod::none;
    if (name == "dpgda") return BenchMethod::dpgda;
    if (name == "ros") return BenchMethod::ros;
    if (name == "smote") return BenchMethod::smote;
    if (name == "jitter") return BenchMethod::jitter;
    throw Error("unknown benchmark method: " + name);
}

std::string bench_method_name(BenchMethod method) {
    switch (method) {
        case BenchMethod::none: return "none";
        case BenchMethod::dpgda: return "dpgda";
        case BenchMethod::ros: return "ros";
        case BenchMethod::smote: return "smote";
        case BenchMethod::jitter: return "jitter";
    }
    throw Error("unknown benchmark method");
}

namespace {

// One independent unit of work: (dataset, rep, method, level). Units redo
// the split themselves so they can run on any thread in any order.
struct Cell {
    std::size_t dataset_idx = 0;
    std::size_t rep = 0;
    BenchMethod method = BenchMethod::none;
    double level = 0.0;
};

int minority_class_of(const Dataset& train) {
    auto counts = train.class_counts();
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] < counts[best]) best = c;
    return static_cast<int>(best);
}

void run_cell(const Cell& cell, const std::vector<BenchDataset>& datasets,
              const BenchConfig& cfg, BenchResult* out) {
    const BenchDataset& bd = datasets[cell.dataset_idx];
    const std::string method_name = bench_method_name(cell.method);
    for (std::size_t c = 0; c < cfg.classifiers.size(); ++c) {
        out[c].dataset = bd.id;
        out[c].method = method_name;
        out[c].level = cell.level;
        out[c].rep = cell.rep;
        out[c].classifier = classifier_kind_name(cfg.classifiers[c].kind);
    }
    try {
        // same split seed for every method and level, so comparisons within
        // a (dataset, rep) pair are paired
        const std::uint64_t split_seed =
            derive_seed(cfg.master_seed, 0xbe5cULL, cell.dataset_idx, cell.rep);
        auto [train, test] = stratified_split(bd.data, cfg.train_fraction, split_seed);
        const int minority = minority_class_of(train);
        auto counts = train.class_counts();
        const std::size_t m = cell.method == BenchMethod::none
                                  ? 0
                                  : required_synthetic_count(counts[minority], train.n_rows(),
                                                             cell.level);
        const std::uint64_t method_seed =
            derive_seed(split_seed, 0x4d3dULL,
                        static_cast<std::uint64_t>(cell.method),
                        static_cast<std::uint64_t>(std::llround(cell.level * 1e6)));

        Dataset augmented = train;
        double runtime = 0.0;
        std::size_t n_added = 0;
        std::size_t bounds_violations = 0;
        const auto t0 = std::chrono::steady_clock::now();
        switch (cell.method) {
            case BenchMethod::none:
                break;
            case BenchMethod::dpgda: {
                AugmentResult res =
                    augment_dataset(train, minority, cell.level, cfg.pipeline, method_seed);
                n_added = res.n_added;
                bounds_violations = res.n_bounds_violations;
                augmented = std::move(res.augmented);
                break;
            }
            case BenchMethod::ros:
            case BenchMethod::smote:
            case BenchMethod::jitter: {
                SamplerSpec spec;
                spec.kind = cell.method == BenchMethod::ros     ? SamplerKind::ros
                            : cell.method == BenchMethod::smote ? SamplerKind::smote
                                                                : SamplerKind::jitter;
                spec.k_neighbors = cfg.smote_k;
                spec.sigma_fraction = cfg.jitter_sigma_fraction;
                spec.seed = method_seed;
                auto rows = run_sampler(spec, train, minority, m);
                for (const auto& r : rows) augmented.add_row(r, minority);
                n_added = rows.size();
                break;
            }
        }
        runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        double violation_rate = 0.0;
        if (n_added > 0 && !bd.rules.empty()) {
            Dataset synth;
            synth.feature_names = augmented.feature_names;
            synth.class_names = augmented.class_names;
            for (std::size_t i = train.n_rows(); i < augmented.n_rows(); ++i)
                synth.add_row(augmented.row(i), augmented.labels[i]);
            violation_rate = audit(synth, bd.rules).violation_rate;
        }

        for (std::size_t c = 0; c < cfg.classifiers.size(); ++c) {
            ClassifierModel model = train_classifier(cfg.classifiers[c], augmented);
            std::vector<int> pred = predict_all(model, test);
            MacroMetrics m3 = macro_metrics(test.labels, pred, bd.data.n_classes());
            out[c].macro_f1 = m3.f1;
            out[c].macro_precision = m3.precision;
            out[c].macro_recall = m3.recall;
            out[c].runtime_seconds = runtime;
            out[c].violation_rate = violation_rate;
            out[c].bounds_violations = bounds_violations;
        }
    } catch (const std::exception& e) {
        for (std::size_t c = 0; c < cfg.classifiers.size(); ++c) {
            out[c].failed = true;
            out[c].error = e.what();
        }
    }
}

}  // namespace

std::vector<BenchResult> run_benchmark(const std::vector<BenchDataset>& datasets,
                                       const std::vector<BenchMethod>& methods,
                                       const BenchConfig& cfg) {
    if (datasets.empty()) throw Error("run_benchmark: no datasets");
    if (cfg.reps == 0) throw Error("run_benchmark: reps must be positive");
    if (cfg.classifiers.empty()) throw Error("run_benchmark: no classifiers");
    for (double level : cfg.levels)
        if (!(level > 0.0 && level < 1.0))
            throw Error("run_benchmark: levels must lie in (0,1)");

    std::vector<Cell> cells;
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
            if (cfg.include_baseline) cells.push_back({di, rep, BenchMethod::none, 0.0});
            for (BenchMethod method : methods) {
                if (method == BenchMethod::none) continue;
                for (double level : cfg.levels) cells.push_back({di, rep, method, level});
            }
        }
    }

    const std::size_t per_cell = cfg.classifiers.size();
    std::vector<BenchResult> results(cells.size() * per_cell);
    const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            run_cell(cells[i], datasets, cfg, results.data() + i * per_cell);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) return;
                run_cell(cells[i], datasets, cfg, results.data() + i * per_cell);
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(jobs, cells.size()); ++t)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return results;
}

std::string results_to_csv(const std::vector<BenchResult>& results) {
    std::string out =
        "dataset,method,level,rep,classifier,f1,precision,recall,runtime_s,violation_rate,"
        "status\n";
    char buf[256];
    for (const BenchResult& r : results) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%g,%zu,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%s\n",
                      r.dataset.c_str(), r.method.c_str(), r.level, r.rep, r.classifier.c_str(),
                      r.macro_f1, r.macro_precision, r.macro_recall, r.runtime_seconds,
                      r.violation_rate, r.failed ? "failed" : "ok");
        out += buf;
    }
    return out;
}

std::vector<BenchResult> results_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open results file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error("empty results file: " + path);
    std::vector<BenchResult> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        if (cols.size() < 10)
            throw Error("results file " + path + ": malformed line " + std::to_string(lineno));
        BenchResult r;
        try {
            r.dataset = cols[0];
            r.method = cols[1];
            r.level = std::stod(cols[2]);
            r.rep = static_cast<std::size_t>(std::stoull(cols[3]));
            r.classifier = cols[4];
            r.macro_f1 = std::stod(cols[5]);
            r.macro_precision = std::stod(cols[6]);
            r.macro_recall = std::stod(cols[7]);
            r.runtime_seconds = std::stod(cols[8]);
            r.violation_rate = std::stod(cols[9]);
        } catch (const std::exception&) {
            throw Error("results file " + path + ": bad value on line " + std::to_string(lineno));
        }
        r.failed = cols.size() > 10 && cols[10] == "failed";
        out.push_back(std::move(r));
    }
    return out;
}

std::map<std::pair<std::string, std::string>, Aggregate> aggregate_by_dataset_method(
    const std::vector<BenchResult>& results) {
    std::map<std::pair<std::string, std::string>, Aggregate> out;
    for (const BenchResult& r : results) {
        if (r.failed) continue;
        Aggregate& agg = out[{r.dataset, r.method}];
        agg.mean_f1 += r.macro_f1;
        agg.mean_violation_rate += r.violation_rate;
        agg.mean_runtime += r.runtime_seconds;
        agg.n_rows += 1;
    }
    for (auto& [key, agg] : out) {
        (void)key;
        if (agg.n_rows == 0) continue;
        double n = static_cast<double>(agg.n_rows);
        agg.mean_f1 /= n;
        agg.mean_violation_rate /= n;
        agg.mean_runtime /= n;
    }
    return out;
}

std::vector<AblationRow> ablation_grid(const std::vector<BenchDataset>& datasets,
                                       const BenchConfig& cfg) {
    std::vector<AblationRow> rows;
    for (int w1 = 1; w1 <= 3; ++w1) {
        for (int w2 = 1; w2 <= 3; ++w2) {
            for (int w3 = 1; w3 <= 3; ++w3) {
                BenchConfig local = cfg;
                local.include_baseline = false;
                local.pipeline.weights = {static_cast<double>(w1), static_cast<double>(w2),
                                          static_cast<double>(w3)};
                auto results = run_benchmark(datasets, {BenchMethod::dpgda}, local);
                double sum = 0.0;
                std::size_t n = 0;
                for (const BenchResult& r : results) {
                    if (r.failed) continue;
                    sum += r.macro_f1;
                    ++n;
                }
                AblationRow row;
                row.weights = local.pipeline.weights;
                row.mean_f1 = n ? sum / static_cast<double>(n) : 0.0;
                rows.push_back(row);
            }
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const AblationRow& a, const AblationRow& b) {
        if (a.mean_f1 != b.mean_f1) return a.mean_f1 > b.mean_f1;
        auto ka = std::array{a.weights.adherence, a.weights.distance, a.weights.sparsity};
        auto kb = std::array{b.weights.adherence, b.weights.distance, b.weights.sparsity};
        return ka < kb;
    });
    return rows;
}

std::string ablation_to_csv(const std::vector<AblationRow>& rows) {
    std::string out = "rank,w_adherence,w_distance,w_sparsity,mean_f1\n";
    char buf[128];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%g,%g,%g,%.6f\n", i + 1,
                      rows[i].weights.adherence, rows[i].weights.distance,
                      rows[i].weights.sparsity, rows[i].mean_f1);
        out += buf;
    }
    return out;
}

}  // namespace dpgda
