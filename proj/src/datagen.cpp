#include "dpgda/datagen.hpp"

#include "dpgda/toml_lite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dpgda {

std::vector<DomainRule> DomainConfig::rules() const {
    std::vector<DomainRule> out;
    for (const FeatureGenSpec& f : features)
        out.push_back({f.name, f.rule_lo, f.rule_hi, "valid range for " + f.name});
    return out;
}

std::vector<std::string> builtin_domain_names() {
    return {"healthcare", "finance", "quality_control", "fraud_detection", "energy", "education"};
}

namespace {

FeatureGenSpec normal_feat(std::string name, double mean, double sd, double gen_lo, double gen_hi,
                           double rule_lo, double rule_hi, double w) {
    return {std::move(name), FeatureDist::normal, mean, sd, gen_lo, gen_hi, rule_lo, rule_hi, w};
}

FeatureGenSpec uniform_feat(std::string name, double gen_lo, double gen_hi, double rule_lo,
                            double rule_hi, double w) {
    return {std::move(name), FeatureDist::uniform, 0.0, 0.0, gen_lo, gen_hi, rule_lo, rule_hi, w};
}

}  // namespace

DomainConfig builtin_domain(const std::string& name) {
    DomainConfig cfg;
    cfg.name = name;
    cfg.n_samples = 1000;
    if (name == "healthcare") {
        cfg.minority_fraction = 0.25;  // 3:1
        cfg.features = {
            normal_feat("BMI", 27.0, 6.0, 13.0, 59.0, 12.0, 60.0, 1.0),
            normal_feat("Cholesterol", 200.0, 45.0, 82.0, 398.0, 80.0, 400.0, 1.0),
            normal_feat("Age", 52.0, 17.0, 19.0, 94.0, 18.0, 95.0, 0.6),
            normal_feat("HeartRate", 75.0, 14.0, 32.0, 218.0, 30.0, 220.0, 0.0),
        };
    } else if (name == "finance") {
        cfg.minority_fraction = 0.5;  // 1:1
        cfg.features = {
            normal_feat("CreditScore", 580.0, 110.0, 302.0, 848.0, 300.0, 850.0, 1.2),
            normal_feat("Income", 75000.0, 35000.0, 1100.0, 249000.0, 1000.0, 250000.0, 1.0),
            uniform_feat("NumChildren", 0.0, 5.9, 0.0, 6.0, -0.4),
            normal_feat("AccountAge", 10.0, 6.0, 0.1, 49.9, 0.0, 50.0, 0.0),
        };
    } else if (name == "quality_control") {
        cfg.minority_fraction = 1.0 / 3.0;  // 2:1
        cfg.features = {
            normal_feat("Temperature", 100.0, 9.0, 61.0, 139.0, 60.0, 140.0, 1.0),
            normal_feat("Pressure", 10.0, 2.3, 1.1, 19.9, 1.0, 20.0, 0.8),
            normal_feat("Speed", 200.0, 48.0, 51.0, 349.0, 50.0, 350.0, 0.5),
            normal_feat("Vibration", 5.5, 2.1, 0.05, 11.95, 0.0, 12.0, -0.8),
        };
    } else if (name == "fraud_detection") {
        cfg.minority_fraction = 0.25;  // 3:1
        cfg.features = {
            normal_feat("TransactionAmount", 2500.0, 2300.0, 1.0, 11990.0, 0.0, 12000.0, 1.2),
            uniform_feat("TransactionTime", 0.1, 30.9, 0.0, 31.0, 0.6),
            uniform_feat("MerchantScore", 0.005, 0.995, 0.0, 1.0, -1.0),
            normal_feat("CustomerAge", 45.0, 15.0, 18.5, 99.5, 18.0, 100.0, 0.0),
        };
    } else if (name == "energy") {
        cfg.minority_fraction = 0.5;  // 1:1
        cfg.features = {
            normal_feat("Usage", 1.5, 0.5, 0.02, 4.98, 0.0, 5.0, 1.0),
            normal_feat("Baseline", 300.0, 95.0, 51.0, 599.0, 50.0, 600.0, 0.7),
            normal_feat("Voltage", 225.0, 14.0, 181.0, 259.0, 180.0, 260.0, -0.6),
        };
    } else if (name == "education") {
        cfg.minority_fraction = 0.5;  // 1:1
        cfg.features = {
            normal_feat("Attendance", 78.0, 12.0, 0.5, 99.5, 0.0, 100.0, 1.0),
            normal_feat("Grades", 72.0, 13.0, 0.5, 99.5, 0.0, 100.0, 1.0),
            uniform_feat("StudyHours", 0.1, 21.9, 0.0, 22.0, 0.5),
        };
    } else {
        throw Error("unknown builtin domain: " + name);
    }
    return cfg;
}

DomainConfig domain_config_from_toml(const std::string& path) {
    TomlTable doc = parse_toml_file(path);
    DomainConfig cfg;
    cfg.name = doc.string_or("name", "custom");
    cfg.n_samples = static_cast<std::size_t>(doc.number_or("n_samples", 1000));
    cfg.minority_fraction = doc.number_or("minority_fraction", 0.25);
    cfg.label_noise = doc.number_or("label_noise", 0.5);
    auto it = doc.arrays.find("features");
    if (it == doc.arrays.end() || it->second.empty())
        throw Error("domain config " + path + " has no [[features]] tables");
    for (const TomlTable& ft : it->second) {
        FeatureGenSpec f;
        f.name = ft.at("name").as_string();
        std::string dist = ft.string_or("dist", "normal");
        if (dist == "normal") {
            f.dist = FeatureDist::normal;
        } else if (dist == "uniform") {
            f.dist = FeatureDist::uniform;
        } else {
            throw Error("domain config " + path + ": unknown dist: " + dist);
        }
        f.mean = ft.number_or("mean", 0.0);
        f.stddev = ft.number_or("stddev", 1.0);
        f.gen_lo = ft.at("gen_lo").as_number();
        f.gen_hi = ft.at("gen_hi").as_number();
        f.rule_lo = ft.number_or("rule_lo", f.gen_lo);
        f.rule_hi = ft.number_or("rule_hi", f.gen_hi);
        f.label_weight = ft.number_or("label_weight", 0.0);
        if (!(f.gen_lo < f.gen_hi))
            throw Error("domain config " + path + ": gen_lo must be below gen_hi for " + f.name);
        if (f.rule_lo > f.gen_lo || f.rule_hi < f.gen_hi)
            throw Error("domain config " + path + ": rule range must enclose gen range for " +
                        f.name);
        cfg.features.push_back(std::move(f));
    }
    return cfg;
}

Dataset generate_domain(const DomainConfig& cfg, std::uint64_t seed) {
    if (cfg.features.empty()) throw Error("domain config has no features");
    if (!(cfg.minority_fraction > 0.0 && cfg.minority_fraction < 1.0))
        throw Error("minority fraction must be in (0,1)");
    const std::size_t n = cfg.n_samples;
    const std::size_t d = cfg.features.size();

    Rng rng(derive_seed(seed, 0xda7aULL));
    std::vector<double> values(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const FeatureGenSpec& f = cfg.features[j];
            double v;
            if (f.dist == FeatureDist::uniform) {
                v = rng.uniform(f.gen_lo, f.gen_hi);
            } else {
                // truncated normal by bounded rejection, then clamp
                v = f.mean + rng.normal() * f.stddev;
                for (int attempt = 0; attempt < 32 && (v < f.gen_lo || v > f.gen_hi); ++attempt)
                    v = f.mean + rng.normal() * f.stddev;
                v = std::clamp(v, f.gen_lo, f.gen_hi);
            }
            values[i * d + j] = v;
        }
    }

    // class score: weighted standardized features + noise; label by quantile
    std::vector<double> mean(d, 0.0), sd(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += values[i * d + j];
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double delta = values[i * d + j] - mean[j];
            sd[j] += delta * delta;
        }
    for (double& s : sd) s = std::sqrt(s / static_cast<double>(n));

    std::vector<double> score(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (sd[j] > 0.0)
                s += cfg.features[j].label_weight * (values[i * d + j] - mean[j]) / sd[j];
        }
        score[i] = s + rng.normal() * cfg.label_noise;
    }
    auto n_minority = static_cast<std::size_t>(
        std::llround(cfg.minority_fraction * static_cast<double>(n)));
    n_minority = std::clamp<std::size_t>(n_minority, 1, n - 1);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return a < b;
    });

    Dataset ds;
    ds.values = std::move(values);
    ds.labels.assign(n, 0);
    for (std::size_t i = 0; i < n_minority; ++i) ds.labels[order[i]] = 1;
    for (const FeatureGenSpec& f : cfg.features) ds.feature_names.push_back(f.name);
    ds.class_names = {"negative", "positive"};
    ds.validate();
    return ds;
}

std::vector<DomainRule> shape_rules() {
    return {{"dim1", 0.0, 100.0, "bounding box"}, {"dim2", 0.0, 100.0, "bounding box"}};
}

ShapeKind shape_kind_from_name(const std::string& name) {
    if (name == "subclus") return ShapeKind::subclus;
    if (name == "clover") return ShapeKind::clover;
    if (name == "paw") return ShapeKind::paw;
    throw Error("unknown shape: " + name);
}

namespace {

bool in_subclus(double x, double y) {
    // three axis-aligned rectangular sub-clusters
    auto rect = [&](double x0, double x1, double y0, double y1) {
        return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    };
    return rect(10, 30, 20, 40) || rect(40, 60, 55, 75) || rect(70, 90, 20, 40);
}

bool in_clover(double x, double y) {
    // center disc plus four petals around (50, 50)
    double dx = x - 50.0, dy = y - 50.0;
    double r = std::sqrt(dx * dx + dy * dy);
    if (r <= 8.0) return true;
    double theta = std::atan2(dy, dx);
    double petal = 22.0 * std::abs(std::cos(2.0 * theta));
    return r <= petal;
}

bool in_paw(double x, double y) {
    auto disc = [&](double cx, double cy, double rad) {
        double dx = x - cx, dy = y - cy;
        return dx * dx + dy * dy <= rad * rad;
    };
    // three toes plus a larger pad
    return disc(30, 75, 8) || disc(50, 82, 8) || disc(70, 75, 8) || disc(50, 45, 16);
}

}  // namespace

Dataset generate_shape(ShapeKind kind, std::size_t n, double majority_ratio, std::uint64_t seed) {
    if (n < 12) throw Error("generate_shape: n must be >= 12");
    if (majority_ratio < 1.0) throw Error("generate_shape: ratio must be >= 1");
    auto n_minority = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) / (majority_ratio + 1.0)));
    n_minority = std::clamp<std::size_t>(n_minority, 1, n - 1);
    std::size_t n_majority = n - n_minority;

    auto inside = [kind](double x, double y) {
        switch (kind) {
            case ShapeKind::subclus: return in_subclus(x, y);
            case ShapeKind::clover: return in_clover(x, y);
            case ShapeKind::paw: return in_paw(x, y);
        }
        return false;
    };

    Rng rng(derive_seed(seed, 0x54a9ULL));
    Dataset ds;
    ds.feature_names = {"dim1", "dim2"};
    ds.class_names = {"majority", "minority"};
    for (std::size_t i = 0; i < n_majority; ++i) {
        double p[2] = {rng.uniform(0.5, 99.5), rng.uniform(0.5, 99.5)};
        ds.add_row(p, 0);
    }
    for (std::size_t i = 0; i < n_minority; ++i) {
        double x, y;
        do {
            x = rng.uniform(0.5, 99.5);
            y = rng.uniform(0.5, 99.5);
        } while (!inside(x, y));
        double p[2] = {x, y};
        ds.add_row(p, 1);
    }
    ds.validate();
    return ds;
}

nlohmann::json domain_meta(const DomainConfig& cfg, std::uint64_t seed) {
    nlohmann::json feats = nlohmann::json::array();
    for (const FeatureGenSpec& f : cfg.features) {
        feats.push_back({{"name", f.name},
                         {"dist", f.dist == FeatureDist::normal ? "normal" : "uniform"},
                         {"mean", f.mean},
                         {"stddev", f.stddev},
                         {"gen_lo", f.gen_lo},
                         {"gen_hi", f.gen_hi},
                         {"rule_lo", f.rule_lo},
                         {"rule_hi", f.rule_hi},
                         {"label_weight", f.label_weight}});
    }
    return {{"name", cfg.name},
            {"n_samples", cfg.n_samples},
            {"minority_fraction", cfg.minority_fraction},
            {"label_noise", cfg.label_noise},
            {"seed", seed},
            {"features", std::move(feats)}};
}

}  // namespace dpgda
