#include "dpgda/samplers.hpp"

#include <algorithm>
#include <cmath>

namespace dpgda {

namespace {

std::vector<std::size_t> minority_rows(const Dataset& train, int minority_class) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < train.n_rows(); ++i)
        if (train.labels[i] == minority_class) rows.push_back(i);
    if (rows.empty()) throw Error("sampler: minority class has no samples");
    return rows;
}

}  // namespace

std::vector<std::vector<double>> ros(const Dataset& train, int minority_class, std::size_t m,
                                     std::uint64_t seed) {
    auto rows = minority_rows(train, minority_class);
    Rng rng(seed);
    std::vector<std::vector<double>> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto x = train.row(rows[rng.uniform_index(rows.size())]);
        out.emplace_back(x.begin(), x.end());
    }
    return out;
}

std::vector<std::vector<double>> smote(const Dataset& train, int minority_class, std::size_t m,
                                       std::size_t k, std::uint64_t seed) {
    auto rows = minority_rows(train, minority_class);
    if (rows.size() < 2) throw Error("smote: need at least 2 minority samples");
    if (k < 1 || k > rows.size() - 1)
        throw Error("smote: k must be in [1, minority_count - 1]; try a smaller k");
    if (m == 0) return {};
    const std::size_t d = train.n_features();

    // brute-force k nearest minority neighbors for every minority sample
    std::vector<std::vector<std::size_t>> neighbors(rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(rows.size() - 1);
        auto xa = train.row(rows[a]);
        for (std::size_t b = 0; b < rows.size(); ++b) {
            if (b == a) continue;
            auto xb = train.row(rows[b]);
            double sq = 0.0;
            for (std::size_t f = 0; f < d; ++f) {
                double delta = xa[f] - xb[f];
                sq += delta * delta;
            }
            dist.emplace_back(sq, b);
        }
        std::sort(dist.begin(), dist.end());
        for (std::size_t j = 0; j < k; ++j) neighbors[a].push_back(dist[j].second);
    }

    Rng rng(seed);
    std::vector<std::vector<double>> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t a = rng.uniform_index(rows.size());
        std::size_t b = neighbors[a][rng.uniform_index(k)];
        double lambda = rng.uniform();
        auto xa = train.row(rows[a]);
        auto xb = train.row(rows[b]);
        std::vector<double> x(d);
        for (std::size_t f = 0; f < d; ++f) x[f] = xa[f] + lambda * (xb[f] - xa[f]);
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<std::vector<double>> jitter(const Dataset& train, int minority_class, std::size_t m,
                                        double sigma_fraction, std::uint64_t seed) {
    auto rows = minority_rows(train, minority_class);
    FeatureStats stats = feature_stats(train);
    Rng rng(seed);
    const std::size_t d = train.n_features();
    std::vector<std::vector<double>> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto base = train.row(rows[rng.uniform_index(rows.size())]);
        std::vector<double> x(base.begin(), base.end());
        for (std::size_t f = 0; f < d; ++f)
            x[f] += rng.normal() * sigma_fraction * stats.range[f];
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<std::vector<double>> run_sampler(const SamplerSpec& spec, const Dataset& train,
                                             int minority_class, std::size_t m) {
    switch (spec.kind) {
        case SamplerKind::ros:
            return ros(train, minority_class, m, spec.seed);
        case SamplerKind::smote:
            return smote(train, minority_class, m, spec.k_neighbors, spec.seed);
        case SamplerKind::jitter:
            return jitter(train, minority_class, m, spec.sigma_fraction, spec.seed);
    }
    throw Error("unknown sampler kind");
}

SamplerKind sampler_kind_from_name(const std::string& name) {
    if (name == "ros") return SamplerKind::ros;
    if (name == "smote") return SamplerKind::smote;
    if (name == "jitter") return SamplerKind::jitter;
    throw Error("unknown sampler: " + name);
}

std::string sampler_kind_name(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::ros: return "ros";
        case SamplerKind::smote: return "smote";
        case SamplerKind::jitter: return "jitter";
    }
    return "?";
}

}  // namespace dpgda
