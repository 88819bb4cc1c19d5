#pragma once

#include <string>
#include <vector>

#include "dpgda/common.hpp"

#include "json.hpp"

namespace dpgda {

struct RankSummary {
    std::vector<std::string> methods;
    std::vector<double> median;
    std::vector<double> mad;  // median absolute deviation
    std::vector<double> mean_rank;
    double statistic = 0.0;   // Friedman chi-square
    double p_value = 1.0;
    double critical_difference = 0.0;  // Nemenyi CD at alpha
    double alpha = 0.05;
    std::size_t n_methods = 0;
    std::size_t n_datasets = 0;
};

/// scores[dataset][method]; higher is better (rank 1 = best, ties get the
/// average rank). Requires k >= 3 methods and N >= 2 datasets, no gaps.
RankSummary friedman_nemenyi(const std::vector<std::vector<double>>& scores,
                             const std::vector<std::string>& method_names, double alpha = 0.05);

/// Survival function of the chi-square distribution (upper tail).
double chi2_sf(double x, std::size_t dof);

/// Studentized-range q constant for the Nemenyi test at alpha = 0.05,
/// k = 2..20 methods.
double nemenyi_q_alpha05(std::size_t k);

nlohmann::json rank_summary_to_json(const RankSummary& summary);

}  // namespace dpgda
