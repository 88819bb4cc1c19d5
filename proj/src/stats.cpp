#include "dpgda/stats.hpp"

#include <algorithm>
#include <cmath>

namespace dpgda {

namespace {

// Regularized lower incomplete gamma P(a, x), series + continued fraction.
double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw Error("gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // series representation
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // continued fraction for Q, return 1 - Q
    double b = x + 1.0 - a;
    double c = 1e308;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double chi2_sf(double x, std::size_t dof) {
    if (x <= 0.0) return 1.0;
    return 1.0 - gamma_p(static_cast<double>(dof) / 2.0, x / 2.0);
}

double nemenyi_q_alpha05(std::size_t k) {
    // q_{0.05} for the Nemenyi post-hoc test (infinite df studentized range
    // divided by sqrt 2), k = 2..20
    static const double table[] = {
        1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164,
        3.219, 3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517, 3.544};
    if (k < 2 || k > 20) throw Error("nemenyi_q_alpha05: k must be in [2, 20]");
    return table[k - 2];
}

RankSummary friedman_nemenyi(const std::vector<std::vector<double>>& scores,
                             const std::vector<std::string>& method_names, double alpha) {
    const std::size_t n = scores.size();
    if (n < 2) throw Error("friedman_nemenyi: need at least 2 datasets");
    const std::size_t k = method_names.size();
    if (k < 3) throw Error("friedman_nemenyi: need at least 3 methods");
    for (const auto& row : scores)
        if (row.size() != k) throw Error("friedman_nemenyi: missing cells in score table");

    RankSummary summary;
    summary.methods = method_names;
    summary.alpha = alpha;
    summary.n_methods = k;
    summary.n_datasets = n;
    summary.mean_rank.assign(k, 0.0);

    for (const auto& row : scores) {
        // rank 1 = highest score; ties get the average of covered ranks
        std::vector<std::size_t> order(k);
        for (std::size_t j = 0; j < k; ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (row[a] != row[b]) return row[a] > row[b];
            return a < b;
        });
        std::vector<double> rank(k);
        std::size_t i = 0;
        while (i < k) {
            std::size_t j = i;
            while (j + 1 < k && row[order[j + 1]] == row[order[i]]) ++j;
            double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
            for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
            i = j + 1;
        }
        for (std::size_t j = 0; j < k; ++j) summary.mean_rank[j] += rank[j];
    }
    for (double& r : summary.mean_rank) r /= static_cast<double>(n);

    double kd = static_cast<double>(k);
    double nd = static_cast<double>(n);
    double sum_r2 = 0.0;
    for (double r : summary.mean_rank) sum_r2 += r * r;
    summary.statistic =
        12.0 * nd / (kd * (kd + 1.0)) * (sum_r2 - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
    if (summary.statistic < 0.0) summary.statistic = 0.0;  // guard tiny negative round-off
    summary.p_value = chi2_sf(summary.statistic, k - 1);
    summary.critical_difference =
        nemenyi_q_alpha05(k) * std::sqrt(kd * (kd + 1.0) / (6.0 * nd));

    summary.median.resize(k);
    summary.mad.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = scores[i][j];
        double med = median_of(col);
        summary.median[j] = med;
        for (double& v : col) v = std::abs(v - med);
        summary.mad[j] = median_of(col);
    }
    return summary;
}

nlohmann::json rank_summary_to_json(const RankSummary& summary) {
    nlohmann::json methods = nlohmann::json::array();
    for (std::size_t j = 0; j < summary.methods.size(); ++j) {
        methods.push_back({{"method", summary.methods[j]},
                           {"median", summary.median[j]},
                           {"mad", summary.mad[j]},
                           {"mean_rank", summary.mean_rank[j]}});
    }
    return {{"methods", std::move(methods)},
            {"friedman_statistic", summary.statistic},
            {"p_value", summary.p_value},
            {"critical_difference", summary.critical_difference},
            {"alpha", summary.alpha},
            {"n_methods", summary.n_methods},
            {"n_datasets", summary.n_datasets}};
}

}  // namespace dpgda
