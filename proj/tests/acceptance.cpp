// Acceptance gate: one line per criterion, PASS or FAIL, with a short
// justification. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "dpgda/bench.hpp"
#include "dpgda/datagen.hpp"
#include "dpgda/report.hpp"
#include "dpgda/stats.hpp"

using namespace dpgda;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s: criterion %d (%s) - %s\n", ok ? "PASS" : "FAIL", idx, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::vector<BenchDataset> build_suite(std::uint64_t seed) {
    std::vector<BenchDataset> suite;
    for (const std::string& name : builtin_domain_names()) {
        DomainConfig cfg = builtin_domain(name);
        BenchDataset bd;
        bd.id = name;
        bd.data = generate_domain(cfg, derive_seed(seed, std::hash<std::string>{}(name)));
        bd.rules = cfg.rules();
        suite.push_back(std::move(bd));
    }
    for (const std::string& name : {"subclus", "clover", "paw"}) {
        BenchDataset bd;
        bd.id = name;
        bd.data = generate_shape(shape_kind_from_name(name), 600, 5.0,
                                 derive_seed(seed, std::hash<std::string>{}(name)));
        bd.rules = shape_rules();
        suite.push_back(std::move(bd));
    }
    return suite;
}

struct GaFixture {
    Dataset train;
    Forest forest;
    ClassBounds bounds;
    FeatureStats stats;
    std::vector<double> query;
};

GaFixture make_ga_fixture(std::uint64_t seed) {
    GaFixture fx;
    fx.train.feature_names = {"x", "y"};
    fx.train.class_names = {"c0", "c1"};
    Rng rng(seed);
    for (int i = 0; i < 30; ++i) {
        double a[2] = {rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)};
        fx.train.add_row(a, 0);
        double b[2] = {rng.uniform(7.0, 10.0), rng.uniform(7.0, 10.0)};
        fx.train.add_row(b, 1);
    }
    ForestConfig cfg;
    cfg.n_trees = 8;
    cfg.seed = seed + 1;
    fx.forest = train_forest(fx.train, cfg);
    DPGraph dpg = build_dpg(fx.forest, fx.train);
    fx.bounds = extract_class_bounds(dpg, fx.forest, fx.train);
    fx.stats = feature_stats(fx.train);
    for (std::size_t i = 0; i < fx.train.n_rows(); ++i)
        if (fx.train.labels[i] == 1 && fx.query.empty())
            fx.query.assign(fx.train.row(i).begin(), fx.train.row(i).end());
    return fx;
}

ClassBounds brute_force_bounds(const Forest& forest, const Dataset& train, int decimals) {
    ClassBounds out;
    out.n_features = train.n_features();
    for (const Tree& tree : forest.trees) {
        for (std::size_t i = 0; i < train.n_rows(); ++i) {
            int cls = tree_predict(tree, train.row(i));
            auto& box = out.per_class[cls];
            if (box.empty()) box.assign(train.n_features(), Interval{});
            for (const SplitStep& step : decision_path(tree, train.row(i))) {
                double thr = quantize_outward(step.threshold, decimals, step.leq);
                Interval& iv = box[step.feature];
                if (step.leq) {
                    if (!std::isfinite(iv.upper) || thr > iv.upper) iv.upper = thr;
                } else {
                    if (!std::isfinite(iv.lower) || thr < iv.lower) iv.lower = thr;
                }
            }
        }
    }
    return out;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(DPGDA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// results.csv with the wall-clock runtime column blanked; timing is the
// one column that cannot be bit-stable across runs
std::string mask_runtime_column(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        if (cols.size() > 8) cols[8] = "_";
        for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
        out += "\n";
    }
    return out;
}

}  // namespace

int main() {
    const auto t_start = std::chrono::steady_clock::now();
    const std::uint64_t master = 20240817;
    std::vector<BenchDataset> suite = build_suite(master);
    std::vector<std::string> domain_names = builtin_domain_names();
    std::set<std::string> domain_ids(domain_names.begin(), domain_names.end());

    BenchConfig cfg;
    cfg.levels = {0.15, 0.30, 0.50};
    cfg.reps = 10;
    cfg.master_seed = master;
    cfg.jobs = 1;  // single worker keeps per-cell wall-clock timings clean
    cfg.pipeline.forest.n_trees = 30;
    cfg.pipeline.ga.population_size = 40;
    cfg.pipeline.ga.max_generations = 60;
    std::vector<BenchResult> results = run_benchmark(
        suite, {BenchMethod::dpgda, BenchMethod::ros, BenchMethod::smote, BenchMethod::jitter},
        cfg);

    // criterion 1: zero violations for every accepted DPG-da sample on the
    // six domains, against both the extracted bounds and the authored rules
    {
        std::size_t rows = 0, clean = 0, failed = 0;
        for (const BenchResult& r : results) {
            if (r.method != "dpgda" || domain_ids.count(r.dataset) == 0) continue;
            ++rows;
            if (r.failed) {
                ++failed;
                continue;
            }
            if (r.violation_rate == 0.0 && r.bounds_violations == 0) ++clean;
        }
        auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start);
        report(1, "zero-violation guarantee", rows > 0 && clean == rows,
               std::to_string(clean) + "/" + std::to_string(rows) +
                   " domain cells with rate 0 against bounds and rules, " +
                   std::to_string(failed) + " failed cells, levels {15,30,50}% x 10 reps, " +
                   fmt(secs.count()) + "s elapsed");
    }

    // criterion 2: jitter violates, convex samplers cannot
    {
        bool ok = true;
        std::string detail;
        for (const std::string& name : {"finance", "healthcare"}) {
            const BenchDataset* bd = nullptr;
            for (const BenchDataset& d : suite)
                if (d.id == name) bd = &d;
            auto counts = bd->data.class_counts();
            int minority = 0;
            for (std::size_t c = 1; c < counts.size(); ++c)
                if (counts[c] < counts[static_cast<std::size_t>(minority)])
                    minority = static_cast<int>(c);
            double jitter_sum = 0.0, ros_max = 0.0, smote_max = 0.0;
            for (std::uint64_t rep = 0; rep < 10; ++rep) {
                std::uint64_t seed = derive_seed(master, 0x0c2ULL, rep);
                auto audit_rows = [&](const std::vector<std::vector<double>>& rows) {
                    Dataset synth;
                    synth.feature_names = bd->data.feature_names;
                    synth.class_names = bd->data.class_names;
                    for (const auto& r : rows) synth.add_row(r, 1);
                    return audit(synth, bd->rules).violation_rate;
                };
                jitter_sum += audit_rows(jitter(bd->data, minority, 500, 0.3, seed));
                ros_max = std::max(ros_max, audit_rows(ros(bd->data, minority, 500, seed)));
                smote_max = std::max(smote_max, audit_rows(smote(bd->data, minority, 500, 5, seed)));
            }
            double jitter_mean = jitter_sum / 10.0;
            ok = ok && jitter_mean > 0.01 && ros_max == 0.0 && smote_max == 0.0;
            detail += name + ": jitter " + fmt(jitter_mean) + ", ros " + fmt(ros_max) +
                      ", smote " + fmt(smote_max) + "; ";
        }
        report(2, "violation detector contrast", ok, detail + "threshold 0.01 over 10 reps");
    }

    // criterion 3: bounds equal brute-force path enumeration on 50 forests
    {
        std::size_t matched = 0;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            Rng pick(derive_seed(master, 0x0c3ULL, seed));
            std::size_t d = 1 + pick.uniform_index(4);
            std::size_t n = 10 + pick.uniform_index(31);
            Dataset ds;
            for (std::size_t f = 0; f < d; ++f) ds.feature_names.push_back("f" + std::to_string(f));
            ds.class_names = {"c0", "c1"};
            std::vector<double> row(d);
            for (std::size_t i = 0; i < n; ++i) {
                int label = static_cast<int>(i % 2);
                for (std::size_t f = 0; f < d; ++f)
                    row[f] = pick.uniform(0.0, 10.0) + label * 6.0;
                ds.add_row(row, label);
            }
            ForestConfig fcfg;
            fcfg.n_trees = 1 + pick.uniform_index(3);
            fcfg.max_depth = 1 + pick.uniform_index(2);
            fcfg.seed = seed;
            Forest forest = train_forest(ds, fcfg);
            DPGraph dpg = build_dpg(forest, ds);
            ClassBounds got = extract_class_bounds(dpg, forest, ds);
            ClassBounds expected = brute_force_bounds(forest, ds, dpg.quantize_decimals);
            bool same = got.per_class.size() == expected.per_class.size();
            for (const auto& [cls, box] : expected.per_class)
                same = same && got.per_class.count(cls) == 1 && got.per_class.at(cls) == box;
            if (same) ++matched;
        }
        report(3, "bounds oracle equivalence", matched == 50,
               std::to_string(matched) + "/50 randomized small forests match exactly");
    }

    // criteria 4 and 9 share 100 seeded evolve runs
    std::size_t ga_ok = 0, trace_ok = 0;
    bool identity_ok = true, gate_ok = true;
    {
        GaFixture fx = make_ga_fixture(404);
        Candidate identity = evaluate_fitness(fx.query, fx.query, fx.bounds, 1, fx.forest,
                                              FitnessWeights{}, fx.stats);
        identity_ok = identity.fitness == 5.0 && identity.distance == 0.0 &&
                      identity.sparsity == 0.0 && identity.adherence == 1.0;
        std::vector<double> hostile = {1.0, 1.0};
        Candidate gated = evaluate_fitness(hostile, fx.query, fx.bounds, 1, fx.forest,
                                           FitnessWeights{}, fx.stats);
        gate_ok = gated.validity == 0.0 && gated.fitness == 0.0;

        GAConfig ga;
        ga.population_size = 14;
        ga.max_generations = 20;
        ga.plateau_patience = 20;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            ga.seed = seed;
            EvolveResult res =
                evolve(fx.query, 1, fx.bounds, fx.forest, ga, FitnessWeights{}, fx.stats);
            bool run_ok = !res.trace.empty();
            for (std::size_t g = 0; g < res.trace.size(); ++g) {
                const Candidate& b = res.trace[g].best;
                run_ok = run_ok && b.adherence >= 0.0 && b.adherence <= 1.0 &&
                         b.distance >= 0.0 && b.distance <= 1.0 && b.sparsity >= 0.0 &&
                         b.sparsity <= 1.0 && (b.validity == 0.0 || b.validity == 1.0);
                if (b.validity == 0.0) run_ok = run_ok && b.fitness == 0.0;
                if (g > 0) run_ok = run_ok && b.fitness >= res.trace[g - 1].best.fitness;
            }
            run_ok = run_ok && predict(fx.forest, res.accepted) == 1 &&
                     check_bounds(fx.bounds, 1, res.accepted).satisfied;
            if (run_ok) ++ga_ok;

            // criterion 9 on the same traces: exact telescoping plus
            // bit-level heatmap metadata round trip
            bool t_ok = true;
            for (std::size_t f = 0; f < fx.query.size(); ++f) {
                double initial = res.trace.front().best.x[f] - res.trace.front().delta[f];
                double sum = 0.0;
                for (const TraceRecord& rec : res.trace) sum += rec.delta[f];
                t_ok = t_ok && initial + sum == res.trace.back().best.x[f];
            }
            Figure fig = evolution_heatmap(res.trace, fx.train.feature_names);
            std::vector<double> parsed;
            std::size_t pos = 0;
            while ((pos = fig.svg.find("data-value=\"", pos)) != std::string::npos) {
                pos += 12;
                std::size_t end = fig.svg.find('"', pos);
                parsed.push_back(std::strtod(fig.svg.substr(pos, end - pos).c_str(), nullptr));
            }
            t_ok = t_ok && parsed.size() == fx.query.size() * res.trace.size();
            for (std::size_t f = 0; f < fx.query.size() && t_ok; ++f)
                for (std::size_t g = 0; g < res.trace.size(); ++g)
                    t_ok = t_ok &&
                           parsed[f * res.trace.size() + g] == res.trace[g].delta[f];
            if (t_ok) ++trace_ok;
        }
        report(4, "ga invariants", ga_ok == 100 && identity_ok && gate_ok,
               std::to_string(ga_ok) +
                   "/100 runs monotone with components in [0,1] and V=1, A=1 at acceptance; "
                   "identity fitness 5.0 " +
                   (identity_ok ? "exact" : "WRONG") + ", V=0 gate " +
                   (gate_ok ? "exact" : "WRONG"));
    }

    // criterion 5: mean macro F1 with DPG-da vs the no-augmentation control
    {
        std::map<std::string, std::pair<double, std::size_t>> none_acc, dpgda_acc;
        for (const BenchResult& r : results) {
            if (r.failed) continue;
            if (r.method == "none") {
                none_acc[r.dataset].first += r.macro_f1;
                none_acc[r.dataset].second++;
            } else if (r.method == "dpgda") {
                dpgda_acc[r.dataset].first += r.macro_f1;
                dpgda_acc[r.dataset].second++;
            }
        }
        std::size_t wins = 0;
        std::string detail;
        for (const BenchDataset& bd : suite) {
            double none_mean = none_acc[bd.id].first / none_acc[bd.id].second;
            double dpgda_mean = dpgda_acc[bd.id].first / dpgda_acc[bd.id].second;
            bool win = dpgda_mean >= none_mean;
            if (win) ++wins;
            detail += bd.id + (win ? " +" : " -") + fmt(dpgda_mean - none_mean) + " ";
        }
        report(5, "desk-scale f1 improvement", wins >= 6,
               std::to_string(wins) + "/9 datasets at or above baseline (deltas: " + detail +
                   ")");
    }

    // criterion 6: Friedman/Nemenyi against an independent recomputation
    {
        std::size_t matched = 0;
        Rng rng(606);
        for (int t = 0; t < 20; ++t) {
            std::size_t k = 3 + rng.uniform_index(4);
            std::size_t n = 2 + rng.uniform_index(9);
            std::vector<std::vector<double>> scores(n, std::vector<double>(k));
            std::vector<std::string> names;
            for (std::size_t j = 0; j < k; ++j) names.push_back("m" + std::to_string(j));
            for (auto& row : scores)
                for (double& v : row) v = std::round(rng.uniform(0.0, 1.0) * 20.0) / 20.0;
            RankSummary s = friedman_nemenyi(scores, names);

            std::vector<double> mean_rank(k, 0.0);
            for (const auto& row : scores)
                for (std::size_t j = 0; j < k; ++j) {
                    double rank = 1.0, ties = 0.0;
                    for (std::size_t l = 0; l < k; ++l) {
                        if (row[l] > row[j]) rank += 1.0;
                        if (l != j && row[l] == row[j]) ties += 1.0;
                    }
                    mean_rank[j] += (rank + ties / 2.0) / static_cast<double>(n);
                }
            double sum_r2 = 0.0;
            for (double r : mean_rank) sum_r2 += r * r;
            double kd = static_cast<double>(k), nd = static_cast<double>(n);
            double stat =
                12.0 * nd / (kd * (kd + 1.0)) * (sum_r2 - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
            if (stat < 0.0) stat = 0.0;
            double cd = nemenyi_q_alpha05(k) * std::sqrt(kd * (kd + 1.0) / (6.0 * nd));
            bool same = std::abs(s.statistic - stat) <= 1e-9 &&
                        std::abs(s.critical_difference - cd) <= 1e-9;
            for (std::size_t j = 0; j < k; ++j)
                same = same && std::abs(s.mean_rank[j] - mean_rank[j]) <= 1e-9;
            if (same) ++matched;
        }
        std::vector<std::vector<double>> tied(5, std::vector<double>(4, 0.5));
        RankSummary flat = friedman_nemenyi(tied, {"a", "b", "c", "d"});
        double reference_point = nemenyi_q_alpha05(8) * std::sqrt(8.0 * 9.0 / (6.0 * 27.0));
        report(6, "statistics oracle", matched == 20 && flat.statistic == 0.0,
               std::to_string(matched) +
                   "/20 tables match brute force to 1e-9, tied table statistic 0; note: "
                   "k=8, N=27 gives CD " +
                   fmt(reference_point) + " with standard constants, the reported 1.167 is "
                   "not independently confirmed");
    }

    // criterion 7: DPG-da augmentation runtime dominates ROS and SMOTE
    {
        auto agg = aggregate_by_dataset_method(results);
        bool ok = true;
        double worst = 1e300;
        std::string detail;
        for (const BenchDataset& bd : suite) {
            double dpgda_rt = agg.at({bd.id, "dpgda"}).mean_runtime;
            double ros_rt = agg.at({bd.id, "ros"}).mean_runtime;
            double smote_rt = agg.at({bd.id, "smote"}).mean_runtime;
            double factor = dpgda_rt / std::max(std::max(ros_rt, smote_rt), 1e-12);
            worst = std::min(worst, factor);
            detail += bd.id + " " + fmt(factor) + "x ";
            ok = ok && dpgda_rt >= 10.0 * ros_rt && dpgda_rt >= 10.0 * smote_rt;
        }
        report(7, "runtime ordering", ok,
               "min dpgda/(ros,smote) runtime factor " + fmt(worst) +
                   "x across 9 datasets, requirement 10x (" + detail + ")");
    }

    // criterion 8: bench output stable across --jobs, modulo the wall-clock
    // runtime column (timing measurements cannot be byte-stable)
    {
        fs::path dir = fs::temp_directory_path() / "dpgda_acceptance_c8";
        fs::remove_all(dir);
        fs::create_directories(dir / "data");
        for (const std::string& name : {"subclus", "paw"}) {
            Dataset ds = generate_shape(shape_kind_from_name(name), 200, 4.0, 88);
            write_csv(ds, (dir / "data" / (name + ".csv")).string());
            std::ofstream((dir / "data" / (name + ".rules.json")).string())
                << rules_to_json(shape_rules()).dump();
        }
        std::string common = "bench --datasets " + (dir / "data").string() +
                             " --methods dpgda,ros --levels 30,50 --reps 2 --seed 99 "
                             "--trees 10 --population 12 --generations 15";
        int rc1 = run_cli(common + " --jobs 1 --out " + (dir / "r1.csv").string());
        int rc4 = run_cli(common + " --jobs 4 --out " + (dir / "r4.csv").string());
        std::string a = read_file(dir / "r1.csv"), b = read_file(dir / "r4.csv");
        bool ok = rc1 == 0 && rc4 == 0 && !a.empty() &&
                  mask_runtime_column(a) == mask_runtime_column(b);
        report(8, "determinism across --jobs", ok,
               std::string("jobs 1 vs 4 results.csv ") +
                   (ok ? "identical" : "DIFFER") +
                   " with the runtime_s column masked (wall clock; raw bytes " +
                   (a == b ? "also identical" : "differ only there") + ")");
    }

    // criterion 9 verdict comes from the traces gathered with criterion 4
    report(9, "trace fidelity", trace_ok == 100,
           std::to_string(trace_ok) +
               "/100 evolve runs: exact delta telescoping and bit-level heatmap metadata "
               "round trip");

    // criterion 10: the ablate command emits the full deterministic grid
    {
        fs::path dir = fs::temp_directory_path() / "dpgda_acceptance_c10";
        fs::remove_all(dir);
        fs::create_directories(dir / "data");
        Dataset ds = generate_shape(ShapeKind::subclus, 150, 4.0, 7);
        write_csv(ds, (dir / "data" / "subclus.csv").string());
        std::ofstream((dir / "data" / "subclus.rules.json").string())
            << rules_to_json(shape_rules()).dump();
        std::string common = "ablate --datasets " + (dir / "data").string() +
                             " --levels 30 --reps 1 --seed 7 --trees 8 --population 8 "
                             "--generations 6";
        int rc1 = run_cli(common + " --out " + (dir / "a1.csv").string());
        int rc2 = run_cli(common + " --out " + (dir / "a2.csv").string());
        std::string a = read_file(dir / "a1.csv"), b = read_file(dir / "a2.csv");
        std::size_t rows = 0;
        bool has_default = false, sorted = true;
        double prev = 1e300;
        std::istringstream in(a);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            ++rows;
            std::vector<std::string> cols;
            std::stringstream ss(line);
            std::string tok;
            while (std::getline(ss, tok, ',')) cols.push_back(tok);
            if (cols.size() == 5) {
                if (cols[1] == "2" && cols[2] == "1" && cols[3] == "3") has_default = true;
                double f1 = std::stod(cols[4]);
                sorted = sorted && f1 <= prev;
                prev = f1;
            }
        }
        bool ok = rc1 == 0 && rc2 == 0 && rows == 27 && has_default && sorted && a == b;
        report(10, "ablation grid", ok,
               std::to_string(rows) + "/27 configurations, default (2,1,3) " +
                   (has_default ? "present" : "MISSING") + ", ranking " +
                   (sorted ? "descending" : "UNSORTED") + ", rerun " +
                   (a == b ? "byte-identical" : "DIFFERS"));
    }

    auto total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start);
    std::printf("%d/10 criteria passed in %.1fs\n", 10 - g_failures, total.count());
    return g_failures;
}
