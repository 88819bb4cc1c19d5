#include "dpgda/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace dpgda {

ViolationReport audit(const Dataset& samples, const std::vector<DomainRule>& rules) {
    std::vector<std::size_t> rule_feature(rules.size());
    for (std::size_t r = 0; r < rules.size(); ++r) {
        auto it = std::find(samples.feature_names.begin(), samples.feature_names.end(),
                            rules[r].feature);
        if (it == samples.feature_names.end())
            throw Error("audit: rule references unknown feature '" + rules[r].feature + "'");
        rule_feature[r] = static_cast<std::size_t>(it - samples.feature_names.begin());
    }

    ViolationReport report;
    report.n_synth = samples.n_rows();
    for (std::size_t i = 0; i < samples.n_rows(); ++i) {
        auto x = samples.row(i);
        std::vector<std::size_t> broken;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            double v = x[rule_feature[r]];
            if (v < rules[r].lower || v > rules[r].upper) broken.push_back(r);
        }
        if (!broken.empty()) {
            report.n_violating_samples++;
            report.per_sample.emplace_back(i, std::move(broken));
        }
    }
    report.violation_rate =
        report.n_synth == 0 ? 0.0
                            : static_cast<double>(report.n_violating_samples) /
                                  static_cast<double>(report.n_synth);
    return report;
}

std::vector<DomainRule> rules_from_json(const nlohmann::json& doc) {
    if (!doc.contains("rules") || !doc["rules"].is_array())
        throw Error("rules document: missing 'rules' array");
    std::vector<DomainRule> rules;
    std::size_t i = 0;
    for (const auto& jr : doc["rules"]) {
        DomainRule rule;
        if (!jr.contains("feature") || !jr["feature"].is_string())
            throw Error("rules[" + std::to_string(i) + "].feature: expected string");
        rule.feature = jr["feature"].get<std::string>();
        auto read_bound = [&](const char* key, double fallback) {
            if (!jr.contains(key) || jr[key].is_null()) return fallback;
            if (!jr[key].is_number())
                throw Error("rules[" + std::to_string(i) + "]." + key + ": expected number or null");
            return jr[key].get<double>();
        };
        rule.lower = read_bound("lower", rule.lower);
        rule.upper = read_bound("upper", rule.upper);
        if (rule.lower > rule.upper)
            throw Error("rules[" + std::to_string(i) + "]: lower exceeds upper");
        rule.description = jr.value("description", std::string());
        rules.push_back(std::move(rule));
        ++i;
    }
    return rules;
}

std::vector<DomainRule> rules_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open rules file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed rules JSON in " + path + ": " + e.what());
    }
    return rules_from_json(doc);
}

nlohmann::json rules_to_json(const std::vector<DomainRule>& rules) {
    nlohmann::json arr = nlohmann::json::array();
    for (const DomainRule& r : rules) {
        nlohmann::json jr;
        jr["feature"] = r.feature;
        jr["lower"] = std::isfinite(r.lower) ? nlohmann::json(r.lower) : nlohmann::json(nullptr);
        jr["upper"] = std::isfinite(r.upper) ? nlohmann::json(r.upper) : nlohmann::json(nullptr);
        if (!r.description.empty()) jr["description"] = r.description;
        arr.push_back(std::move(jr));
    }
    return {{"rules", std::move(arr)}};
}

double mean_rate_over_runs(const std::vector<ViolationReport>& reports) {
    if (reports.empty()) throw Error("mean_rate_over_runs: empty report list");
    double sum = 0.0;
    for (const auto& r : reports) sum += r.violation_rate;
    return sum / static_cast<double>(reports.size());
}

nlohmann::json report_to_json(const ViolationReport& report,
                              const std::vector<DomainRule>& rules) {
    nlohmann::json per_sample = nlohmann::json::array();
    for (const auto& [idx, broken] : report.per_sample) {
        nlohmann::json names = nlohmann::json::array();
        for (std::size_t r : broken) names.push_back(rules[r].feature);
        per_sample.push_back({{"sample", idx}, {"violated_rules", std::move(names)}});
    }
    return {{"n_synth", report.n_synth},
            {"n_violating_samples", report.n_violating_samples},
            {"violation_rate", report.violation_rate},
            {"violations", std::move(per_sample)}};
}

}  // namespace dpgda
