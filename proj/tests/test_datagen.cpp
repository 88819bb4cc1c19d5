#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "dpgda/datagen.hpp"

using namespace dpgda;

TEST_CASE("builtin domains generate their configured sizes and ratios") {
    struct Expect {
        const char* name;
        std::size_t d;
        std::size_t minority;
    };
    // ratios: healthcare/fraud 3:1, quality 2:1, finance/energy/education 1:1
    std::vector<Expect> expectations = {
        {"healthcare", 4, 250},      {"finance", 4, 500}, {"quality_control", 4, 333},
        {"fraud_detection", 4, 250}, {"energy", 3, 500},  {"education", 3, 500}};
    for (const Expect& e : expectations) {
        DomainConfig cfg = builtin_domain(e.name);
        Dataset ds = generate_domain(cfg, 11);
        CHECK(ds.n_rows() == 1000);
        CHECK(ds.n_features() == e.d);
        auto counts = ds.class_counts();
        CHECK(counts[1] == e.minority);
        double target = static_cast<double>(1000 - e.minority) / static_cast<double>(e.minority);
        CHECK(imbalance_ratio(ds) == doctest::Approx(target).epsilon(0.1));
    }
    CHECK(builtin_domain_names().size() == 6);
    CHECK_THROWS_AS(builtin_domain("nope"), Error);
}

TEST_CASE("generated domain data self-audits at rate zero") {
    for (const std::string& name : builtin_domain_names()) {
        DomainConfig cfg = builtin_domain(name);
        Dataset ds = generate_domain(cfg, 5);
        ViolationReport report = audit(ds, cfg.rules());
        CHECK(report.violation_rate == 0.0);
    }
}

TEST_CASE("domain generation is seed-deterministic") {
    DomainConfig cfg = builtin_domain("finance");
    Dataset a = generate_domain(cfg, 9);
    Dataset b = generate_domain(cfg, 9);
    CHECK(a.values == b.values);
    CHECK(a.labels == b.labels);
    Dataset c = generate_domain(cfg, 10);
    CHECK(a.values != c.values);
}

TEST_CASE("shape datasets: counts, box containment, dimensionality") {
    for (const std::string& name : {"subclus", "clover", "paw"}) {
        Dataset ds = generate_shape(shape_kind_from_name(name), 600, 5.0, 3);
        CHECK(ds.n_rows() == 600);
        CHECK(ds.n_features() == 2);
        auto counts = ds.class_counts();
        CHECK(counts[0] == 500);
        CHECK(counts[1] == 100);
        CHECK(audit(ds, shape_rules()).violation_rate == 0.0);
        for (double v : ds.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 100.0);
        }
    }
    CHECK_THROWS_AS(shape_kind_from_name("oval"), Error);
    CHECK_THROWS_AS(generate_shape(ShapeKind::paw, 6, 5.0, 0), Error);
}

TEST_CASE("shape generation is seed-deterministic") {
    Dataset a = generate_shape(ShapeKind::clover, 300, 5.0, 7);
    Dataset b = generate_shape(ShapeKind::clover, 300, 5.0, 7);
    CHECK(a.values == b.values);
}

TEST_CASE("domain toml manifest parsing") {
    auto path = (std::filesystem::temp_directory_path() / "dpgda_domain.toml").string();
    std::ofstream out(path, std::ios::trunc);
    out << "name = \"toy\"\n"
           "n_samples = 120\n"
           "minority_fraction = 0.25\n"
           "label_noise = 0.3\n"
           "\n"
           "[[features]]\n"
           "name = \"A\"\n"
           "dist = \"normal\"\n"
           "mean = 10.0\n"
           "stddev = 2.0\n"
           "gen_lo = 1.0\n"
           "gen_hi = 19.0\n"
           "rule_lo = 0.0\n"
           "rule_hi = 20.0\n"
           "label_weight = 1.0\n"
           "\n"
           "[[features]]\n"
           "name = \"B\"\n"
           "dist = \"uniform\"\n"
           "gen_lo = 0.0   # inclusive\n"
           "gen_hi = 5.0\n";
    out.close();
    DomainConfig cfg = domain_config_from_toml(path);
    CHECK(cfg.name == "toy");
    CHECK(cfg.n_samples == 120);
    CHECK(cfg.minority_fraction == 0.25);
    REQUIRE(cfg.features.size() == 2);
    CHECK(cfg.features[0].dist == FeatureDist::normal);
    CHECK(cfg.features[1].dist == FeatureDist::uniform);
    CHECK(cfg.features[1].rule_lo == 0.0);  // defaults to the gen range

    Dataset ds = generate_domain(cfg, 1);
    CHECK(ds.n_rows() == 120);
    CHECK(ds.class_counts()[1] == 30);
    CHECK(audit(ds, cfg.rules()).violation_rate == 0.0);
}

TEST_CASE("domain toml manifest validation errors") {
    auto dir = std::filesystem::temp_directory_path();
    auto no_features = (dir / "dpgda_nf.toml").string();
    std::ofstream(no_features, std::ios::trunc) << "name = \"x\"\n";
    CHECK_THROWS_AS(domain_config_from_toml(no_features), Error);

    auto bad_rule = (dir / "dpgda_br.toml").string();
    std::ofstream(bad_rule, std::ios::trunc)
        << "[[features]]\nname = \"A\"\ngen_lo = 0.0\ngen_hi = 5.0\nrule_lo = 1.0\n";
    CHECK_THROWS_AS(domain_config_from_toml(bad_rule), Error);
}

TEST_CASE("domain meta records the generator settings") {
    DomainConfig cfg = builtin_domain("energy");
    nlohmann::json meta = domain_meta(cfg, 44);
    CHECK(meta.at("name") == "energy");
    CHECK(meta.at("seed") == 44);
    CHECK(meta.at("features").size() == 3);
}
