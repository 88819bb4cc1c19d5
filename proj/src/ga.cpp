#include "dpgda/ga.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace dpgda {

void GAConfig::validate() const {
    if (population_size < 2) throw Error("GA: population_size must be >= 2");
    if (plateau_patience < 1) throw Error("GA: plateau_patience must be >= 1");
    if (max_generations < 1) throw Error("GA: max_generations must be >= 1");
    if (crossover_rate < 0.0 || crossover_rate > 1.0) throw Error("GA: crossover_rate in [0,1]");
    if (elitism_count >= population_size) throw Error("GA: elitism_count < population_size");
    if (tournament_size < 1) throw Error("GA: tournament_size must be >= 1");
}

Candidate evaluate_fitness(std::span<const double> x_a, std::span<const double> x_q,
                           const ClassBounds& bounds, int cls, const Forest& forest,
                           const FitnessWeights& w, const FeatureStats& stats,
                           double sparsity_epsilon_fraction) {
    const std::size_t d = x_q.size();
    if (x_a.size() != d) throw Error("fitness: candidate/query dimension mismatch");
    auto bit = bounds.per_class.find(cls);
    if (bit == bounds.per_class.end())
        throw Error("fitness: class " + std::to_string(cls) + " absent from bounds");

    Candidate cand;
    cand.x.assign(x_a.begin(), x_a.end());
    cand.validity = (predict(forest, x_a) == cls) ? 1.0 : 0.0;

    std::size_t sides = 0, satisfied = 0;
    for (std::size_t f = 0; f < d; ++f) {
        const Interval& iv = bit->second[f];
        if (std::isfinite(iv.lower)) {
            ++sides;
            if (x_a[f] >= iv.lower) ++satisfied;
        }
        if (std::isfinite(iv.upper)) {
            ++sides;
            if (x_a[f] <= iv.upper) ++satisfied;
        }
    }
    cand.adherence = sides == 0 ? 1.0
                                : static_cast<double>(satisfied) / static_cast<double>(sides);

    double sq = 0.0;
    std::size_t changed = 0;
    for (std::size_t f = 0; f < d; ++f) {
        double delta = x_a[f] - x_q[f];
        if (stats.range[f] > 0.0) {
            double scaled = delta / stats.range[f];
            sq += scaled * scaled;
        }
        double eps = stats.range[f] > 0.0 ? sparsity_epsilon_fraction * stats.range[f] : 1e-12;
        if (std::abs(delta) > eps) ++changed;
    }
    cand.distance = std::min(1.0, std::sqrt(sq / static_cast<double>(d)));
    cand.sparsity = static_cast<double>(changed) / static_cast<double>(d);
    cand.fitness = cand.validity * (w.adherence * cand.adherence + w.distance * cand.distance +
                                    w.sparsity * (1.0 - cand.sparsity));
    return cand;
}

namespace {

// Per-feature search geometry. All candidate coordinates live on a dyadic
// grid (a power-of-two step) so that differences between generations, and
// therefore trace deltas, are exact in double arithmetic.
struct GeneBox {
    double init_lo, init_hi;  // finite initialization interval
    double grid = 0.0;        // 0 disables the grid (degenerate width)
    double sigma = 0.0;       // mutation scale
    double clamp_lo = -std::numeric_limits<double>::infinity();  // only for infinite bound sides
    double clamp_hi = std::numeric_limits<double>::infinity();
};

double snap(double v, double grid) {
    if (grid <= 0.0) return v;
    return std::round(v / grid) * grid;
}

double snap_up(double v, double grid) {
    if (grid <= 0.0) return v;
    return std::ceil(v / grid) * grid;
}

double snap_down(double v, double grid) {
    if (grid <= 0.0) return v;
    return std::floor(v / grid) * grid;
}

std::vector<GeneBox> make_boxes(const std::vector<Interval>& box, const FeatureStats& stats,
                                double sigma_fraction) {
    std::vector<GeneBox> genes(box.size());
    for (std::size_t f = 0; f < box.size(); ++f) {
        GeneBox& g = genes[f];
        g.init_lo = std::isfinite(box[f].lower) ? box[f].lower : stats.min[f];
        g.init_hi = std::isfinite(box[f].upper) ? box[f].upper : stats.max[f];
        if (g.init_lo > g.init_hi) g.init_hi = g.init_lo;
        double width = g.init_hi - g.init_lo;
        if (width > 0.0 && std::isfinite(width)) {
            g.grid = std::ldexp(1.0, std::ilogb(width) - 33);
            g.sigma = sigma_fraction * width;
        }
        // candidates may leave finite DPG bounds (penalized via A), but
        // infinite sides are held to the observed data range
        if (!std::isfinite(box[f].lower)) g.clamp_lo = snap_up(stats.min[f], g.grid);
        if (!std::isfinite(box[f].upper)) g.clamp_hi = snap_down(stats.max[f], g.grid);
    }
    return genes;
}

double init_gene(const GeneBox& g, Rng& rng) {
    double v = rng.uniform(g.init_lo, g.init_hi);
    if (g.grid > 0.0) {
        double s = snap(v, g.grid);
        if (s < g.init_lo) s = snap_up(g.init_lo, g.grid);
        if (s > g.init_hi) s = snap_down(g.init_hi, g.grid);
        if (s >= g.init_lo && s <= g.init_hi) return s;
    }
    return g.init_lo;
}

struct Attempt {
    std::vector<TraceRecord> trace;
    std::optional<Candidate> accepted;
};

Attempt run_attempt(std::span<const double> raw_query, int cls, const ClassBounds& bounds,
                    const Forest& forest, const GAConfig& cfg, const FitnessWeights& w,
                    const FeatureStats& stats, const std::vector<GeneBox>& genes,
                    std::uint64_t seed) {
    const std::size_t d = raw_query.size();
    Rng rng(seed);

    // The trace baseline is the grid-snapped query so generation-0 deltas
    // telescope exactly with the rest of the trace.
    std::vector<double> query(raw_query.begin(), raw_query.end());
    for (std::size_t f = 0; f < d; ++f) query[f] = snap(query[f], genes[f].grid);

    std::vector<Candidate> pop(cfg.population_size);
    for (auto& cand : pop) {
        std::vector<double> x(d);
        for (std::size_t f = 0; f < d; ++f) x[f] = init_gene(genes[f], rng);
        cand = evaluate_fitness(x, query, bounds, cls, forest, w, stats,
                                cfg.sparsity_epsilon_fraction);
    }

    Attempt result;
    std::optional<Candidate> best_feasible;
    const std::vector<double>* prev_best = &query;
    double prev_fitness = -std::numeric_limits<double>::infinity();
    std::size_t plateau = 0;

    auto order = [&pop](std::size_t a, std::size_t b) {
        if (pop[a].fitness != pop[b].fitness) return pop[a].fitness > pop[b].fitness;
        return a < b;
    };

    for (std::size_t gen = 0; gen < cfg.max_generations; ++gen) {
        std::size_t best_idx = 0;
        for (std::size_t i = 1; i < pop.size(); ++i)
            if (order(i, best_idx)) best_idx = i;
        for (const Candidate& cand : pop) {
            if (cand.validity == 1.0 && cand.adherence == 1.0 &&
                (!best_feasible || cand.fitness > best_feasible->fitness))
                best_feasible = cand;
        }

        TraceRecord rec;
        rec.generation = gen;
        rec.best = pop[best_idx];
        rec.delta.resize(d);
        for (std::size_t f = 0; f < d; ++f) rec.delta[f] = rec.best.x[f] - (*prev_best)[f];
        rec.violated = check_bounds(bounds, cls, rec.best.x).violated;
        result.trace.push_back(std::move(rec));
        prev_best = &result.trace.back().best.x;

        double best_fitness = pop[best_idx].fitness;
        if (gen > 0) {
            plateau = (best_fitness - prev_fitness <= cfg.plateau_epsilon) ? plateau + 1 : 0;
            if (plateau >= cfg.plateau_patience) break;
        }
        prev_fitness = best_fitness;
        if (gen + 1 == cfg.max_generations) break;

        std::vector<std::size_t> ranked(pop.size());
        std::iota(ranked.begin(), ranked.end(), 0);
        std::sort(ranked.begin(), ranked.end(), order);

        std::vector<Candidate> next;
        next.reserve(pop.size());
        for (std::size_t e = 0; e < cfg.elitism_count; ++e) next.push_back(pop[ranked[e]]);

        auto tournament = [&]() {
            std::size_t winner = rng.uniform_index(pop.size());
            for (std::size_t t = 1; t < cfg.tournament_size; ++t) {
                std::size_t challenger = rng.uniform_index(pop.size());
                if (order(challenger, winner)) winner = challenger;
            }
            return winner;
        };

        while (next.size() < pop.size()) {
            const Candidate& p1 = pop[tournament()];
            const Candidate& p2 = pop[tournament()];
            std::vector<double> x(d);
            bool cross = rng.uniform() < cfg.crossover_rate;
            for (std::size_t f = 0; f < d; ++f)
                x[f] = (cross && rng.uniform() < 0.5) ? p2.x[f] : p1.x[f];
            for (std::size_t f = 0; f < d; ++f) {
                const GeneBox& g = genes[f];
                if (g.sigma > 0.0) x[f] += snap(rng.normal() * g.sigma, g.grid);
                x[f] = std::clamp(x[f], g.clamp_lo, g.clamp_hi);
            }
            next.push_back(evaluate_fitness(x, query, bounds, cls, forest, w, stats,
                                            cfg.sparsity_epsilon_fraction));
        }
        pop = std::move(next);
    }

    result.accepted = std::move(best_feasible);
    return result;
}

}  // namespace

EvolveResult evolve(std::span<const double> query, int cls, const ClassBounds& bounds,
                    const Forest& forest, const GAConfig& cfg, const FitnessWeights& w,
                    const FeatureStats& stats) {
    cfg.validate();
    if (w.adherence < 0.0 || w.distance < 0.0 || w.sparsity < 0.0 || w.max_fitness() <= 0.0)
        throw Error("GA: weights must be non-negative and not all zero");
    auto bit = bounds.per_class.find(cls);
    if (bit == bounds.per_class.end())
        throw Error("evolve: class " + std::to_string(cls) + " absent from bounds");
    auto genes = make_boxes(bit->second, stats, cfg.mutation_sigma_fraction);

    Attempt last;
    for (std::size_t attempt = 0; attempt <= cfg.retries_on_infeasible; ++attempt) {
        last = run_attempt(query, cls, bounds, forest, cfg, w, stats, genes,
                           derive_seed(cfg.seed, 0xa771ULL, attempt));
        if (last.accepted) {
            return {std::move(last.accepted->x), std::move(last.trace)};
        }
    }
    throw InfeasibleAugmentation(
        "no candidate with V=1 and A=1 found after " +
            std::to_string(cfg.retries_on_infeasible) + " restarts",
        static_cast<std::size_t>(-1));
}

std::size_t required_synthetic_count(std::size_t n_minority, std::size_t n_total, double level) {
    if (!(level > 0.0 && level < 1.0)) throw Error("augmentation level must be in (0,1)");
    auto n_majority = static_cast<double>(n_total - n_minority);
    double target = std::ceil(level * n_majority / (1.0 - level));
    double m = target - static_cast<double>(n_minority);
    return m > 0.0 ? static_cast<std::size_t>(m) : 0;
}

AugmentResult augment_dataset(const Dataset& train, int minority_class, double level,
                              const AugmentConfig& cfg, std::uint64_t seed) {
    train.validate();
    if (minority_class < 0 || static_cast<std::size_t>(minority_class) >= train.n_classes())
        throw Error("augment_dataset: invalid minority class id");
    auto counts = train.class_counts();
    std::size_t n_min = counts[static_cast<std::size_t>(minority_class)];
    if (n_min == 0) throw Error("augment_dataset: minority class has no samples");

    AugmentResult result;
    result.augmented = train;

    // Stages 1-2: surrogate forest on an internal holdout, then DPG bounds.
    // Run even when no samples are needed; the constraints are a product of
    // the pipeline in their own right.
    auto [surr_train, holdout] =
        stratified_split(train, cfg.holdout_fraction, derive_seed(seed, 0x01dULL));
    ForestConfig fcfg = cfg.forest;
    fcfg.seed = derive_seed(seed, 0xf03eULL);
    Forest forest = train_forest(surr_train, fcfg);
    result.surrogate_holdout_f1 = surrogate_f1(forest, holdout);

    DPGraph dpg = build_dpg(forest, surr_train, cfg.quantize_decimals);
    ClassBounds bounds = extract_class_bounds(dpg, forest, surr_train, cfg.min_support);
    result.constraints = export_constraints(
        bounds, train.feature_names, train.class_names,
        {cfg.quantize_decimals, cfg.min_support, fcfg.seed});

    std::size_t m = required_synthetic_count(n_min, train.n_rows(), level);
    if (m == 0) {
        result.level_already_met = true;
        return result;
    }
    if (!bounds.per_class.contains(minority_class))
        throw InfeasibleAugmentation("no surrogate paths terminate in the minority class", 0);

    std::vector<std::size_t> minority_rows;
    for (std::size_t i = 0; i < train.n_rows(); ++i)
        if (train.labels[i] == minority_class) minority_rows.push_back(i);

    Rng query_rng(derive_seed(seed, 0x9e31ULL));
    std::vector<std::size_t> query_of(m);
    for (std::size_t i = 0; i < m; ++i)
        query_of[i] = minority_rows[query_rng.uniform_index(minority_rows.size())];

    for (std::size_t i = 0; i < m; ++i) {
        GAConfig ga = cfg.ga;
        ga.seed = derive_seed(seed, 0xe01eULL, i);  // per-query seed: parallel-safe
        try {
            EvolveResult ev = evolve(train.row(query_of[i]), minority_class, bounds, forest, ga,
                                     cfg.weights, forest.stats);
            if (!check_bounds(bounds, minority_class, ev.accepted).satisfied)
                result.n_bounds_violations++;
            result.augmented.add_row(ev.accepted, minority_class);
            result.traces.push_back(std::move(ev.trace));
            result.n_added++;
        } catch (const InfeasibleAugmentation& e) {
            throw InfeasibleAugmentation(std::string(e.what()) + " (query row " +
                                             std::to_string(query_of[i]) + ")",
                                         query_of[i]);
        }
    }
    return result;
}

nlohmann::json trace_to_json(const std::vector<TraceRecord>& trace,
                             const std::vector<std::string>& feature_names,
                             std::span<const double> query) {
    nlohmann::json records = nlohmann::json::array();
    for (const TraceRecord& rec : trace) {
        nlohmann::json violated = nlohmann::json::array();
        for (const BoundViolation& v : rec.violated)
            violated.push_back({{"feature", v.feature},
                                {"side", v.side == BoundSide::lower ? "lower" : "upper"}});
        records.push_back({{"generation", rec.generation},
                           {"best",
                            {{"x", rec.best.x},
                             {"fitness", rec.best.fitness},
                             {"V", rec.best.validity},
                             {"A", rec.best.adherence},
                             {"D", rec.best.distance},
                             {"S", rec.best.sparsity}}},
                           {"delta", rec.delta},
                           {"violated", std::move(violated)}});
    }
    return {{"feature_names", feature_names},
            {"query", std::vector<double>(query.begin(), query.end())},
            {"records", std::move(records)}};
}

std::vector<TraceRecord> trace_from_json(const nlohmann::json& doc) {
    std::vector<TraceRecord> trace;
    for (const auto& jr : doc.at("records")) {
        TraceRecord rec;
        rec.generation = jr.at("generation").get<std::size_t>();
        const auto& b = jr.at("best");
        rec.best.x = b.at("x").get<std::vector<double>>();
        rec.best.fitness = b.at("fitness").get<double>();
        rec.best.validity = b.at("V").get<double>();
        rec.best.adherence = b.at("A").get<double>();
        rec.best.distance = b.at("D").get<double>();
        rec.best.sparsity = b.at("S").get<double>();
        rec.delta = jr.at("delta").get<std::vector<double>>();
        for (const auto& jv : jr.at("violated")) {
            rec.violated.push_back({jv.at("feature").get<std::size_t>(),
                                    jv.at("side").get<std::string>() == "lower"
                                        ? BoundSide::lower
                                        : BoundSide::upper});
        }
        trace.push_back(std::move(rec));
    }
    return trace;
}

std::string trace_to_csv(const std::vector<TraceRecord>& trace,
                         const std::vector<std::string>& feature_names) {
    std::ostringstream out;
    out << "generation";
    for (const auto& name : feature_names) out << ",delta_" << name;
    out << ",fitness,V,A,D,S\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << ',' << buf;
    };
    for (const TraceRecord& rec : trace) {
        out << rec.generation;
        for (double dv : rec.delta) put(dv);
        put(rec.best.fitness);
        put(rec.best.validity);
        put(rec.best.adherence);
        put(rec.best.distance);
        put(rec.best.sparsity);
        out << '\n';
    }
    return out.str();
}

}  // namespace dpgda
