#pragma once

#include <vector>

#include "dpgda/common.hpp"

namespace dpgda {

struct MacroMetrics {
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

/// Unweighted macro average over all n_classes classes; 0/0 counts as 0,
/// so a class absent from both vectors contributes zero to the mean.
MacroMetrics macro_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                           std::size_t n_classes);

}  // namespace dpgda
