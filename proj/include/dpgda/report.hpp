#pragma once

#include <string>
#include <vector>

#include "dpgda/bench.hpp"
#include "dpgda/ga.hpp"

namespace dpgda {

/// A rendered figure: the SVG document plus a companion CSV holding every
/// plotted number, so the graphic can be verified mechanically.
struct Figure {
    std::string svg;
    std::string csv;
};

/// Per-feature deltas for each generation transition, one row per feature.
/// A cell carries a trailing violation marker when that generation's best
/// individual breaks a bound on that feature.
std::string delta_table_csv(const std::vector<TraceRecord>& trace,
                            const std::vector<std::string>& feature_names);

/// Features x generations grid; cell intensity is |delta| normalized over
/// the whole grid, the exact value is kept in a data-value attribute.
Figure evolution_heatmap(const std::vector<TraceRecord>& trace,
                         const std::vector<std::string>& feature_names);

/// Horizontal bars of |final - initial| per feature, annotated with the
/// change magnitude and the number of generations that moved the feature.
Figure cumulative_change_barplot(const std::vector<TraceRecord>& trace,
                                 const std::vector<std::string>& feature_names);

/// Methods x datasets matrix of mean violation rates from benchmark rows.
/// Row and column order follows first appearance in the results.
Figure violation_heatmap(const std::vector<BenchResult>& results);

}  // namespace dpgda
