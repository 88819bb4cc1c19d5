#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dpgda/dataset.hpp"

#include "json.hpp"

namespace dpgda {

/// One box-shaped domain rule: feature must lie in [lower, upper]
/// (closed interval; infinite sides always pass).
struct DomainRule {
    std::string feature;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    std::string description;
};

struct ViolationReport {
    std::size_t n_synth = 0;
    std::size_t n_violating_samples = 0;
    // one entry per violating sample: (sample index, rules broken)
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> per_sample;
    double violation_rate = 0.0;
};

/// Audits rows of a dataset against box rules. A sample counts once toward
/// the rate no matter how many rules it breaks.
ViolationReport audit(const Dataset& samples, const std::vector<DomainRule>& rules);

std::vector<DomainRule> rules_from_json(const nlohmann::json& doc);
std::vector<DomainRule> rules_from_file(const std::string& path);
nlohmann::json rules_to_json(const std::vector<DomainRule>& rules);

double mean_rate_over_runs(const std::vector<ViolationReport>& reports);

nlohmann::json report_to_json(const ViolationReport& report,
                              const std::vector<DomainRule>& rules);

}  // namespace dpgda
