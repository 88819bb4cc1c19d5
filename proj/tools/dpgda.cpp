#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dpgda/bench.hpp"
#include "dpgda/datagen.hpp"
#include "dpgda/report.hpp"
#include "dpgda/stats.hpp"
#include "dpgda/toml_lite.hpp"

namespace fs = std::filesystem;
using namespace dpgda;

namespace {

constexpr const char* kVersion = "dpgda 1.0.0";

void progress(const std::string& msg) { std::cerr << "[dpgda] " << msg << "\n"; }

void write_text(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path.string());
    out << content;
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    return nlohmann::json::parse(in);
}

double normalize_level(double v) { return v > 1.0 ? v / 100.0 : v; }

std::vector<double> parse_levels(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(normalize_level(std::stod(tok)));
    }
    if (out.empty()) throw Error("no levels given");
    return out;
}

FitnessWeights parse_weights(const std::string& csv) {
    std::vector<double> w;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) w.push_back(std::stod(tok));
    if (w.size() != 3) throw Error("--weights expects three comma-separated numbers");
    return {w[0], w[1], w[2]};
}

int resolve_class(const Dataset& ds, const std::string& spec) {
    if (spec.empty()) {
        auto counts = ds.class_counts();
        std::size_t best = 0;
        for (std::size_t c = 1; c < counts.size(); ++c)
            if (counts[c] < counts[best]) best = c;
        return static_cast<int>(best);
    }
    for (std::size_t c = 0; c < ds.class_names.size(); ++c)
        if (ds.class_names[c] == spec) return static_cast<int>(c);
    try {
        int id = std::stoi(spec);
        if (id >= 0 && static_cast<std::size_t>(id) < ds.n_classes()) return id;
    } catch (const std::exception&) {
    }
    throw Error("unknown class: " + spec);
}

std::string config_hash(const nlohmann::json& doc) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016zx", std::hash<std::string>{}(doc.dump()));
    return buf;
}

void emit_dataset(const fs::path& dir, const std::string& name, const Dataset& ds,
                  const std::vector<DomainRule>& rules, const nlohmann::json& meta) {
    fs::create_directories(dir);
    write_csv(ds, (dir / (name + ".csv")).string());
    write_text(dir / (name + ".rules.json"), rules_to_json(rules).dump(2) + "\n");
    nlohmann::json full = meta;
    full["config_hash"] = config_hash(meta);
    write_text(dir / (name + ".meta.json"), full.dump(2) + "\n");
    progress("wrote " + (dir / (name + ".csv")).string());
}

std::vector<BenchDataset> load_dataset_dir(const std::string& dir, const std::string& label_col) {
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<BenchDataset> out;
    for (const fs::path& f : files) {
        BenchDataset bd;
        bd.id = f.stem().string();
        bd.data = load_csv(f.string(), label_col);
        fs::path rules = f.parent_path() / (bd.id + ".rules.json");
        if (fs::exists(rules)) bd.rules = rules_from_file(rules.string());
        out.push_back(std::move(bd));
    }
    if (out.empty()) throw Error("no .csv datasets in " + dir);
    return out;
}

void apply_forest_cfg_file(ForestConfig& cfg, const std::string& path) {
    TomlTable doc = parse_toml_file(path);
    cfg.n_trees = static_cast<std::size_t>(doc.number_or("n_trees", cfg.n_trees));
    cfg.max_depth = static_cast<std::size_t>(doc.number_or("max_depth", cfg.max_depth));
    cfg.min_samples_leaf =
        static_cast<std::size_t>(doc.number_or("min_samples_leaf", cfg.min_samples_leaf));
    cfg.bootstrap_fraction = doc.number_or("bootstrap_fraction", cfg.bootstrap_fraction);
    cfg.bootstrap = doc.bool_or("bootstrap", cfg.bootstrap);
    cfg.features_per_split =
        static_cast<std::size_t>(doc.number_or("features_per_split", cfg.features_per_split));
}

struct GenDataArgs {
    std::string config;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t shape_n = 600;
    double shape_ratio = 5.0;
};

void run_gen_data(const GenDataArgs& a) {
    std::vector<std::string> shape_names = {"subclus", "clover", "paw"};
    auto gen_one_domain = [&](const DomainConfig& cfg) {
        std::uint64_t ds_seed = derive_seed(a.seed, std::hash<std::string>{}(cfg.name));
        Dataset ds = generate_domain(cfg, ds_seed);
        emit_dataset(a.out_dir, cfg.name, ds, cfg.rules(), domain_meta(cfg, ds_seed));
    };
    auto gen_one_shape = [&](const std::string& name) {
        std::uint64_t ds_seed = derive_seed(a.seed, std::hash<std::string>{}(name));
        Dataset ds = generate_shape(shape_kind_from_name(name), a.shape_n, a.shape_ratio, ds_seed);
        nlohmann::json meta = {{"name", name},
                               {"kind", "shape"},
                               {"n_samples", a.shape_n},
                               {"majority_ratio", a.shape_ratio},
                               {"seed", ds_seed}};
        emit_dataset(a.out_dir, name, ds, shape_rules(), meta);
    };

    if (a.config.size() > 5 && a.config.substr(a.config.size() - 5) == ".toml") {
        gen_one_domain(domain_config_from_toml(a.config));
        return;
    }
    if (a.config == "all") {
        for (const std::string& name : builtin_domain_names())
            gen_one_domain(builtin_domain(name));
        for (const std::string& name : shape_names) gen_one_shape(name);
        return;
    }
    if (std::find(shape_names.begin(), shape_names.end(), a.config) != shape_names.end()) {
        gen_one_shape(a.config);
        return;
    }
    gen_one_domain(builtin_domain(a.config));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DPG-da: constraint-aware minority-class oversampling"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config-file", "", "TOML file mirroring the command flags");
    bool print_config = false;
    app.add_flag("--print-config", print_config, "Echo the effective configuration and proceed");
    app.require_subcommand(1);

    // gen-data
    GenDataArgs gen;
    auto* cmd_gen = app.add_subcommand("gen-data", "Generate a synthetic benchmark dataset");
    cmd_gen->add_option("--config", gen.config,
                        "Builtin domain, shape name, 'all', or a .toml manifest")
        ->required();
    cmd_gen->add_option("--out", gen.out_dir, "Output directory")->required();
    cmd_gen->add_option("--seed", gen.seed, "Master seed");
    cmd_gen->add_option("--shape-n", gen.shape_n, "Sample count for shape datasets");
    cmd_gen->add_option("--shape-ratio", gen.shape_ratio, "Majority ratio for shape datasets");

    // extract-constraints
    struct {
        std::string train, label_col, forest_cfg, out, dot;
        std::uint64_t seed = 0;
        ForestConfig forest;
        int quantize_decimals = 2;
        double min_support = 0.0;
    } ext;
    auto* cmd_ext =
        app.add_subcommand("extract-constraints", "Train a surrogate forest and export bounds");
    cmd_ext->add_option("--train", ext.train, "Training CSV")->required();
    cmd_ext->add_option("--label-col", ext.label_col, "Label column (name or index; default last)");
    cmd_ext->add_option("--forest-cfg", ext.forest_cfg, "TOML file with forest settings");
    cmd_ext->add_option("--out", ext.out, "Constraints JSON path")->required();
    cmd_ext->add_option("--dot", ext.dot, "Optional DPG Graphviz output path");
    cmd_ext->add_option("--seed", ext.seed, "Master seed");
    auto* ext_trees = cmd_ext->add_option("--trees", ext.forest.n_trees, "Number of trees");
    auto* ext_depth = cmd_ext->add_option("--max-depth", ext.forest.max_depth, "Tree depth cap");
    cmd_ext->add_option("--quantize-decimals", ext.quantize_decimals, "Threshold quantization");
    cmd_ext->add_option("--min-support", ext.min_support, "Predicate support fraction");

    // augment
    struct {
        std::string train, label_col, minority, weights = "2,1,3", out, trace_dir, constraints_out;
        double level = 0.3;
        std::uint64_t seed = 0;
        std::size_t trees = 100, population = 50, generations = 100;
    } aug;
    auto* cmd_aug = app.add_subcommand("augment", "Oversample the minority class with DPG-da");
    cmd_aug->add_option("--train", aug.train, "Training CSV")->required();
    cmd_aug->add_option("--label-col", aug.label_col, "Label column (name or index; default last)");
    cmd_aug->add_option("--minority", aug.minority, "Minority class (name or id; default smallest)");
    cmd_aug->add_option("--level", aug.level, "Target minority proportion")->required();
    cmd_aug->add_option("--weights", aug.weights, "Fitness weights w1,w2,w3");
    cmd_aug->add_option("--seed", aug.seed, "Master seed");
    cmd_aug->add_option("--out", aug.out, "Augmented CSV path")->required();
    cmd_aug->add_option("--trace-dir", aug.trace_dir, "Directory for per-sample GA traces");
    cmd_aug->add_option("--constraints-out", aug.constraints_out, "Extracted constraints JSON");
    cmd_aug->add_option("--trees", aug.trees, "Surrogate forest size");
    cmd_aug->add_option("--population", aug.population, "GA population size");
    cmd_aug->add_option("--generations", aug.generations, "GA generation cap");

    // audit
    struct {
        std::string data, label_col, rules, out;
        std::uint64_t seed = 0;
    } aud;
    auto* cmd_aud = app.add_subcommand("audit", "Check samples against domain rules");
    cmd_aud->add_option("--data", aud.data, "Samples CSV")->required();
    cmd_aud->add_option("--label-col", aud.label_col, "Label column (name or index; default last)");
    cmd_aud->add_option("--rules", aud.rules, "Rules JSON")->required();
    cmd_aud->add_option("--out", aud.out, "Report JSON path")->required();
    cmd_aud->add_option("--seed", aud.seed, "Accepted for interface uniformity");

    // bench
    struct {
        std::string datasets, methods = "dpgda,ros,smote,jitter", levels = "15,30,50", out,
                    label_col;
        std::size_t reps = 10, jobs = 1, trees = 100, population = 50, generations = 100;
        std::uint64_t seed = 0;
        double train_fraction = 0.8;
    } ben;
    auto* cmd_ben = app.add_subcommand("bench", "Run the full benchmark protocol");
    cmd_ben->add_option("--datasets", ben.datasets, "Directory of CSVs plus *.rules.json")
        ->required();
    cmd_ben->add_option("--methods", ben.methods, "Comma-separated method list");
    cmd_ben->add_option("--levels", ben.levels, "Comma-separated levels (percent or fraction)");
    cmd_ben->add_option("--reps", ben.reps, "Repetitions per dataset");
    cmd_ben->add_option("--seed", ben.seed, "Master seed");
    cmd_ben->add_option("--out", ben.out, "Results CSV path")->required();
    cmd_ben->add_option("--jobs", ben.jobs, "Worker threads");
    cmd_ben->add_option("--label-col", ben.label_col, "Label column for all datasets");
    cmd_ben->add_option("--train-fraction", ben.train_fraction, "Train share of each split");
    cmd_ben->add_option("--trees", ben.trees, "Surrogate forest size");
    cmd_ben->add_option("--population", ben.population, "GA population size");
    cmd_ben->add_option("--generations", ben.generations, "GA generation cap");

    // stats
    struct {
        std::string results, out;
        double alpha = 0.05;
        std::uint64_t seed = 0;
    } sta;
    auto* cmd_sta = app.add_subcommand("stats", "Friedman test with Nemenyi post-hoc");
    cmd_sta->add_option("--results", sta.results, "Benchmark results CSV")->required();
    cmd_sta->add_option("--alpha", sta.alpha, "Significance level");
    cmd_sta->add_option("--out", sta.out, "Summary JSON path")->required();
    cmd_sta->add_option("--seed", sta.seed, "Accepted for interface uniformity");

    // ablate
    struct {
        std::string datasets, out, levels = "30", label_col;
        std::size_t reps = 2, jobs = 1, trees = 30, population = 24, generations = 40;
        std::uint64_t seed = 0;
    } abl;
    auto* cmd_abl = app.add_subcommand("ablate", "Fitness-weight grid search");
    cmd_abl->add_option("--datasets", abl.datasets, "Directory of CSVs plus *.rules.json")
        ->required();
    cmd_abl->add_option("--out", abl.out, "Ablation CSV path")->required();
    cmd_abl->add_option("--levels", abl.levels, "Comma-separated levels");
    cmd_abl->add_option("--reps", abl.reps, "Repetitions per dataset");
    cmd_abl->add_option("--seed", abl.seed, "Master seed");
    cmd_abl->add_option("--jobs", abl.jobs, "Worker threads");
    cmd_abl->add_option("--label-col", abl.label_col, "Label column for all datasets");
    cmd_abl->add_option("--trees", abl.trees, "Surrogate forest size");
    cmd_abl->add_option("--population", abl.population, "GA population size");
    cmd_abl->add_option("--generations", abl.generations, "GA generation cap");

    // report
    struct {
        std::string kind, in, out;
        std::uint64_t seed = 0;
    } rep;
    auto* cmd_rep = app.add_subcommand("report", "Render an interpretability figure");
    cmd_rep->add_option("kind", rep.kind, "delta-table | evo-heatmap | bar | violation-heatmap")
        ->required()
        ->check(CLI::IsMember({"delta-table", "evo-heatmap", "bar", "violation-heatmap"}));
    cmd_rep->add_option("--in", rep.in, "Input trace JSON or results CSV")->required();
    cmd_rep->add_option("--out", rep.out, "Output path")->required();
    cmd_rep->add_option("--seed", rep.seed, "Accepted for interface uniformity");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (print_config) std::cout << app.config_to_str(true, false);

    try {
        if (*cmd_gen) {
            run_gen_data(gen);
        } else if (*cmd_ext) {
            Dataset train = load_csv(ext.train, ext.label_col);
            if (!ext.forest_cfg.empty()) apply_forest_cfg_file(ext.forest, ext.forest_cfg);
            // flags take precedence over the config file
            if (*ext_trees) ext.forest.n_trees = ext_trees->as<std::size_t>();
            if (*ext_depth) ext.forest.max_depth = ext_depth->as<std::size_t>();
            ext.forest.seed = derive_seed(ext.seed, 0xf03eULL);
            progress("training surrogate forest (" + std::to_string(ext.forest.n_trees) +
                     " trees)");
            Forest forest = train_forest(train, ext.forest);
            DPGraph dpg = build_dpg(forest, train, ext.quantize_decimals);
            ClassBounds bounds = extract_class_bounds(dpg, forest, train, ext.min_support);
            ConstraintMetadata meta{ext.quantize_decimals, ext.min_support, ext.forest.seed};
            write_text(ext.out, export_constraints(bounds, train.feature_names, train.class_names,
                                                   meta)
                                    .dump(2) +
                                "\n");
            progress("wrote " + ext.out);
            if (!ext.dot.empty()) {
                write_text(ext.dot, dpg_to_dot(dpg, train.feature_names, train.class_names));
                progress("wrote " + ext.dot);
            }
        } else if (*cmd_aug) {
            Dataset train = load_csv(aug.train, aug.label_col);
            int minority = resolve_class(train, aug.minority);
            AugmentConfig cfg;
            cfg.forest.n_trees = aug.trees;
            cfg.ga.population_size = aug.population;
            cfg.ga.max_generations = aug.generations;
            cfg.weights = parse_weights(aug.weights);
            progress("augmenting class " + train.class_names[minority] + " to level " +
                     std::to_string(aug.level));
            AugmentResult res = augment_dataset(train, minority, normalize_level(aug.level), cfg,
                                                aug.seed);
            if (res.level_already_met)
                progress("minority proportion already meets the requested level; copying input");
            write_csv(res.augmented, aug.out);
            progress("wrote " + aug.out + " (" + std::to_string(res.n_added) + " samples added)");
            if (!aug.constraints_out.empty())
                write_text(aug.constraints_out, res.constraints.dump(2) + "\n");
            if (!aug.trace_dir.empty()) {
                fs::create_directories(aug.trace_dir);
                for (std::size_t i = 0; i < res.traces.size(); ++i) {
                    char stem[32];
                    std::snprintf(stem, sizeof(stem), "trace_%04zu", i);
                    std::size_t row = train.n_rows() + i;
                    nlohmann::json doc = trace_to_json(res.traces[i], train.feature_names,
                                                       res.augmented.row(row));
                    write_text(fs::path(aug.trace_dir) / (std::string(stem) + ".json"),
                               doc.dump(2) + "\n");
                    write_text(fs::path(aug.trace_dir) / (std::string(stem) + ".csv"),
                               trace_to_csv(res.traces[i], train.feature_names));
                }
                progress("wrote " + std::to_string(res.traces.size()) + " traces to " +
                         aug.trace_dir);
            }
        } else if (*cmd_aud) {
            Dataset data = load_csv(aud.data, aud.label_col);
            auto rules = rules_from_file(aud.rules);
            ViolationReport report = audit(data, rules);
            write_text(aud.out, report_to_json(report, rules).dump(2) + "\n");
            char rate[32];
            std::snprintf(rate, sizeof(rate), "%.6f", report.violation_rate);
            progress("violation rate " + std::string(rate) + " over " +
                     std::to_string(report.n_synth) + " samples");
        } else if (*cmd_ben) {
            auto datasets = load_dataset_dir(ben.datasets, ben.label_col);
            std::vector<BenchMethod> methods;
            std::stringstream ss(ben.methods);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) methods.push_back(bench_method_from_name(tok));
            BenchConfig cfg;
            cfg.levels = parse_levels(ben.levels);
            cfg.reps = ben.reps;
            cfg.master_seed = ben.seed;
            cfg.jobs = ben.jobs;
            cfg.train_fraction = ben.train_fraction;
            cfg.pipeline.forest.n_trees = ben.trees;
            cfg.pipeline.ga.population_size = ben.population;
            cfg.pipeline.ga.max_generations = ben.generations;
            progress("running " + std::to_string(datasets.size()) + " datasets x " +
                     std::to_string(cfg.reps) + " reps");
            auto results = run_benchmark(datasets, methods, cfg);
            std::size_t failures = 0;
            for (const BenchResult& r : results)
                if (r.failed) ++failures;
            write_text(ben.out, results_to_csv(results));
            progress("wrote " + ben.out + " (" + std::to_string(results.size()) + " rows, " +
                     std::to_string(failures) + " failed)");
        } else if (*cmd_sta) {
            auto results = results_from_csv(sta.results);
            auto agg = aggregate_by_dataset_method(results);
            std::vector<std::string> datasets, methods;
            for (const auto& [key, value] : agg) {
                (void)value;
                if (std::find(datasets.begin(), datasets.end(), key.first) == datasets.end())
                    datasets.push_back(key.first);
                if (std::find(methods.begin(), methods.end(), key.second) == methods.end())
                    methods.push_back(key.second);
            }
            std::sort(datasets.begin(), datasets.end());
            std::sort(methods.begin(), methods.end());
            std::vector<std::vector<double>> scores;
            for (const std::string& ds : datasets) {
                std::vector<double> row;
                for (const std::string& method : methods) {
                    auto it = agg.find({ds, method});
                    if (it == agg.end())
                        throw Error("missing benchmark cell: " + ds + " / " + method);
                    row.push_back(it->second.mean_f1);
                }
                scores.push_back(std::move(row));
            }
            RankSummary summary = friedman_nemenyi(scores, methods, sta.alpha);
            write_text(sta.out, rank_summary_to_json(summary).dump(2) + "\n");
            char buf[96];
            std::snprintf(buf, sizeof(buf), "chi2=%.4f p=%.6f CD=%.4f", summary.statistic,
                          summary.p_value, summary.critical_difference);
            progress(buf);
        } else if (*cmd_abl) {
            auto datasets = load_dataset_dir(abl.datasets, abl.label_col);
            BenchConfig cfg;
            cfg.levels = parse_levels(abl.levels);
            cfg.reps = abl.reps;
            cfg.master_seed = abl.seed;
            cfg.jobs = abl.jobs;
            cfg.pipeline.forest.n_trees = abl.trees;
            cfg.pipeline.ga.population_size = abl.population;
            cfg.pipeline.ga.max_generations = abl.generations;
            progress("running 27 weight combinations");
            auto rows = ablation_grid(datasets, cfg);
            write_text(abl.out, ablation_to_csv(rows));
            progress("wrote " + abl.out);
        } else if (*cmd_rep) {
            if (rep.kind == "violation-heatmap") {
                Figure fig = violation_heatmap(results_from_csv(rep.in));
                write_text(rep.out, fig.svg);
                write_text(rep.out + ".csv", fig.csv);
            } else {
                nlohmann::json doc = read_json(rep.in);
                auto names = doc.at("feature_names").get<std::vector<std::string>>();
                auto trace = trace_from_json(doc);
                if (rep.kind == "delta-table") {
                    write_text(rep.out, delta_table_csv(trace, names));
                } else if (rep.kind == "evo-heatmap") {
                    Figure fig = evolution_heatmap(trace, names);
                    write_text(rep.out, fig.svg);
                    write_text(rep.out + ".csv", fig.csv);
                } else {
                    Figure fig = cumulative_change_barplot(trace, names);
                    write_text(rep.out, fig.svg);
                    write_text(rep.out + ".csv", fig.csv);
                }
            }
            progress("wrote " + rep.out);
        }
    } catch (const InfeasibleAugmentation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
