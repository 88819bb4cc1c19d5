#include "doctest.h"

#include <cmath>

#include "dpgda/ga.hpp"

using namespace dpgda;

namespace {

struct Fixture {
    Dataset train;
    Forest forest;
    ClassBounds bounds;
    FeatureStats stats;
};

// well-separated 2-D blobs so class 1 has a clean feasible box
Fixture make_fixture(std::uint64_t seed, std::size_t n_per_class = 30) {
    Fixture fx;
    fx.train.feature_names = {"x", "y"};
    fx.train.class_names = {"c0", "c1"};
    Rng rng(seed);
    for (std::size_t i = 0; i < n_per_class; ++i) {
        double a[2] = {rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)};
        fx.train.add_row(a, 0);
        double b[2] = {rng.uniform(7.0, 10.0), rng.uniform(7.0, 10.0)};
        fx.train.add_row(b, 1);
    }
    fx.train.validate();
    ForestConfig cfg;
    cfg.n_trees = 8;
    cfg.seed = seed + 1;
    fx.forest = train_forest(fx.train, cfg);
    DPGraph dpg = build_dpg(fx.forest, fx.train);
    fx.bounds = extract_class_bounds(dpg, fx.forest, fx.train);
    fx.stats = feature_stats(fx.train);
    return fx;
}

std::vector<double> minority_query(const Fixture& fx) {
    for (std::size_t i = 0; i < fx.train.n_rows(); ++i)
        if (fx.train.labels[i] == 1)
            return {fx.train.row(i).begin(), fx.train.row(i).end()};
    return {};
}

}  // namespace

TEST_CASE("required synthetic count") {
    CHECK(required_synthetic_count(10, 100, 0.5) == 80);
    CHECK(required_synthetic_count(15, 100, 0.15) == 0);
    CHECK(required_synthetic_count(20, 100, 0.10) == 0);  // level already met
    CHECK(required_synthetic_count(10, 100, 0.3) ==
          static_cast<std::size_t>(std::ceil(0.3 * 90.0 / 0.7)) - 10);
    // oracle: resulting proportion hits the level
    std::size_t m = required_synthetic_count(10, 100, 0.5);
    CHECK(static_cast<double>(10 + m) / static_cast<double>(100 + m) == 0.5);
}

TEST_CASE("identity fitness equals w1 + w3 for a correctly classified query") {
    Fixture fx = make_fixture(3);
    std::vector<double> q = minority_query(fx);
    REQUIRE(predict(fx.forest, q) == 1);
    Candidate c = evaluate_fitness(q, q, fx.bounds, 1, fx.forest, FitnessWeights{}, fx.stats);
    CHECK(c.validity == 1.0);
    CHECK(c.adherence == 1.0);
    CHECK(c.distance == 0.0);
    CHECK(c.sparsity == 0.0);
    CHECK(c.fitness == 5.0);
}

TEST_CASE("validity gate zeroes fitness for misclassified candidates") {
    Fixture fx = make_fixture(4);
    std::vector<double> q = minority_query(fx);
    std::vector<double> other = {1.0, 1.0};  // deep in class 0 territory
    Candidate c = evaluate_fitness(other, q, fx.bounds, 1, fx.forest, FitnessWeights{}, fx.stats);
    CHECK(c.validity == 0.0);
    CHECK(c.fitness == 0.0);
}

TEST_CASE("adherence is the satisfied fraction of finite bound sides") {
    // loan-style: four lower/upper sides, one violated -> A = 3/4
    Fixture fx = make_fixture(5);
    ClassBounds loan;
    loan.n_features = 2;
    const double inf = std::numeric_limits<double>::infinity();
    loan.per_class[1] = {Interval{5.0, inf}, Interval{5.0, 9.0}};  // 3 finite sides
    std::vector<double> q = minority_query(fx);
    std::vector<double> x = {4.0, 8.0};  // first lower side fails
    Candidate c = evaluate_fitness(x, q, loan, 1, fx.forest, FitnessWeights{}, fx.stats);
    CHECK(c.adherence == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("fitness components stay in [0,1] over random candidates") {
    Fixture fx = make_fixture(6);
    std::vector<double> q = minority_query(fx);
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x = {rng.uniform(-20.0, 30.0), rng.uniform(-20.0, 30.0)};
        Candidate c = evaluate_fitness(x, q, fx.bounds, 1, fx.forest, FitnessWeights{}, fx.stats);
        CHECK(c.adherence >= 0.0);
        CHECK(c.adherence <= 1.0);
        CHECK(c.distance >= 0.0);
        CHECK(c.distance <= 1.0);
        CHECK(c.sparsity >= 0.0);
        CHECK(c.sparsity <= 1.0);
        CHECK((c.validity == 0.0 || c.validity == 1.0));
        CHECK(c.fitness == c.validity * (2.0 * c.adherence + 1.0 * c.distance +
                                         3.0 * (1.0 - c.sparsity)));
        CHECK(c.fitness <= FitnessWeights{}.max_fitness());
    }
}

TEST_CASE("evolve: elitism keeps best fitness non-decreasing over 100 seeded runs") {
    Fixture fx = make_fixture(7);
    std::vector<double> q = minority_query(fx);
    GAConfig cfg;
    cfg.population_size = 12;
    cfg.max_generations = 15;
    cfg.plateau_patience = 15;  // run the full loop
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        cfg.seed = seed;
        EvolveResult res = evolve(q, 1, fx.bounds, fx.forest, cfg, FitnessWeights{}, fx.stats);
        REQUIRE(!res.trace.empty());
        for (std::size_t g = 1; g < res.trace.size(); ++g)
            CHECK(res.trace[g].best.fitness >= res.trace[g - 1].best.fitness);
        // the accepted sample is valid and fully in bounds
        CHECK(predict(fx.forest, res.accepted) == 1);
        CHECK(check_bounds(fx.bounds, 1, res.accepted).satisfied);
    }
}

TEST_CASE("evolve trace generations are contiguous from zero") {
    Fixture fx = make_fixture(8);
    std::vector<double> q = minority_query(fx);
    GAConfig cfg;
    cfg.population_size = 10;
    cfg.max_generations = 12;
    cfg.seed = 5;
    EvolveResult res = evolve(q, 1, fx.bounds, fx.forest, cfg, FitnessWeights{}, fx.stats);
    for (std::size_t g = 0; g < res.trace.size(); ++g)
        CHECK(res.trace[g].generation == g);
}

TEST_CASE("evolve is deterministic under a fixed seed") {
    Fixture fx = make_fixture(9);
    std::vector<double> q = minority_query(fx);
    GAConfig cfg;
    cfg.seed = 77;
    cfg.population_size = 16;
    cfg.max_generations = 20;
    EvolveResult a = evolve(q, 1, fx.bounds, fx.forest, cfg, FitnessWeights{}, fx.stats);
    EvolveResult b = evolve(q, 1, fx.bounds, fx.forest, cfg, FitnessWeights{}, fx.stats);
    CHECK(a.accepted == b.accepted);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t g = 0; g < a.trace.size(); ++g) {
        CHECK(a.trace[g].best.x == b.trace[g].best.x);
        CHECK(a.trace[g].delta == b.trace[g].delta);
    }
}

TEST_CASE("telescoping: per-feature delta sums equal final minus initial exactly") {
    Fixture fx = make_fixture(10);
    std::vector<double> q = minority_query(fx);
    GAConfig cfg;
    cfg.population_size = 14;
    cfg.max_generations = 25;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.seed = seed;
        EvolveResult res = evolve(q, 1, fx.bounds, fx.forest, cfg, FitnessWeights{}, fx.stats);
        REQUIRE(!res.trace.empty());
        for (std::size_t f = 0; f < q.size(); ++f) {
            double initial = res.trace.front().best.x[f] - res.trace.front().delta[f];
            double sum = 0.0;
            for (const TraceRecord& rec : res.trace) sum += rec.delta[f];
            CHECK(initial + sum == res.trace.back().best.x[f]);
        }
    }
}

TEST_CASE("point box accepts exactly the unique feasible point") {
    Fixture fx = make_fixture(11);
    std::vector<double> q = minority_query(fx);
    // degenerate box pinned to a point the forest classifies as class 1
    std::vector<double> target = {8.5, 8.5};
    REQUIRE(predict(fx.forest, target) == 1);
    ClassBounds pin;
    pin.n_features = 2;
    pin.per_class[1] = {Interval{8.5, 8.5}, Interval{8.5, 8.5}};
    GAConfig cfg;
    cfg.seed = 1;
    cfg.population_size = 10;
    cfg.max_generations = 30;
    EvolveResult res = evolve(q, 1, pin, fx.forest, cfg, FitnessWeights{}, fx.stats);
    CHECK(res.accepted == target);
}

TEST_CASE("infeasible bounds raise InfeasibleAugmentation after retries") {
    Fixture fx = make_fixture(12);
    std::vector<double> q = minority_query(fx);
    // a box deep inside class-0 territory can never satisfy V=1 for class 1
    ClassBounds hostile;
    hostile.n_features = 2;
    hostile.per_class[1] = {Interval{0.0, 1.0}, Interval{0.0, 1.0}};
    GAConfig cfg;
    cfg.seed = 3;
    cfg.population_size = 8;
    cfg.max_generations = 5;
    cfg.retries_on_infeasible = 2;
    CHECK_THROWS_AS(
        evolve(q, 1, hostile, fx.forest, cfg, FitnessWeights{}, fx.stats),
        InfeasibleAugmentation);
}

TEST_CASE("augment_dataset reaches the requested level with zero bound violations") {
    Fixture fx = make_fixture(13, 40);  // 40/40 balanced; rebuild imbalanced below
    Dataset imb;
    imb.feature_names = fx.train.feature_names;
    imb.class_names = fx.train.class_names;
    std::size_t kept_minority = 0;
    for (std::size_t i = 0; i < fx.train.n_rows(); ++i) {
        if (fx.train.labels[i] == 1 && kept_minority >= 8) continue;
        if (fx.train.labels[i] == 1) ++kept_minority;
        imb.add_row(fx.train.row(i), fx.train.labels[i]);
    }
    AugmentConfig cfg;
    cfg.forest.n_trees = 10;
    cfg.ga.population_size = 16;
    cfg.ga.max_generations = 25;
    AugmentResult res = augment_dataset(imb, 1, 0.4, cfg, 21);
    std::size_t m = required_synthetic_count(8, imb.n_rows(), 0.4);
    CHECK(res.n_added == m);
    CHECK(res.augmented.n_rows() == imb.n_rows() + m);
    CHECK(res.n_bounds_violations == 0);
    CHECK(res.traces.size() == m);
    for (std::size_t i = imb.n_rows(); i < res.augmented.n_rows(); ++i)
        CHECK(res.augmented.labels[i] == 1);
    CHECK(!res.constraints.empty());
    CHECK(res.surrogate_holdout_f1 >= 0.0);

    // determinism across calls
    AugmentResult again = augment_dataset(imb, 1, 0.4, cfg, 21);
    CHECK(again.augmented.values == res.augmented.values);
}

TEST_CASE("augment_dataset with a satisfied level adds nothing") {
    Fixture fx = make_fixture(14, 20);
    AugmentConfig cfg;
    cfg.forest.n_trees = 5;
    AugmentResult res = augment_dataset(fx.train, 1, 0.3, cfg, 1);  // already 50%
    CHECK(res.level_already_met);
    CHECK(res.n_added == 0);
    CHECK(res.augmented.n_rows() == fx.train.n_rows());
}

TEST_CASE("ga config validation") {
    GAConfig cfg;
    cfg.population_size = 1;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = GAConfig{};
    cfg.elitism_count = cfg.population_size;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = GAConfig{};
    cfg.crossover_rate = 1.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK_NOTHROW(GAConfig{}.validate());
}

TEST_CASE("trace serialization round trips and csv has the delta header") {
    Fixture fx = make_fixture(15);
    std::vector<double> q = minority_query(fx);
    GAConfig cfg;
    cfg.seed = 6;
    cfg.population_size = 10;
    cfg.max_generations = 8;
    EvolveResult res = evolve(q, 1, fx.bounds, fx.forest, cfg, FitnessWeights{}, fx.stats);
    nlohmann::json doc = trace_to_json(res.trace, fx.train.feature_names, res.accepted);
    auto back = trace_from_json(doc);
    REQUIRE(back.size() == res.trace.size());
    for (std::size_t g = 0; g < back.size(); ++g) {
        CHECK(back[g].best.x == res.trace[g].best.x);
        CHECK(back[g].delta == res.trace[g].delta);
        CHECK(back[g].best.fitness == res.trace[g].best.fitness);
    }
    std::string csv = trace_to_csv(res.trace, fx.train.feature_names);
    CHECK(csv.rfind("generation,delta_x,delta_y,fitness,V,A,D,S\n", 0) == 0);
}
