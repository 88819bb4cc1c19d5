#include "dpgda/metrics.hpp"

namespace dpgda {

MacroMetrics macro_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                           std::size_t n_classes) {
    if (y_true.size() != y_pred.size()) throw Error("macro_metrics: label length mismatch");
    std::vector<std::size_t> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        auto t = static_cast<std::size_t>(y_true[i]);
        auto p = static_cast<std::size_t>(y_pred[i]);
        if (t >= n_classes || p >= n_classes) throw Error("macro_metrics: label out of range");
        if (t == p) {
            tp[t]++;
        } else {
            fp[p]++;
            fn[t]++;
        }
    }
    MacroMetrics m;
    for (std::size_t c = 0; c < n_classes; ++c) {
        double prec = (tp[c] + fp[c]) ? static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c]) : 0.0;
        double rec = (tp[c] + fn[c]) ? static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fn[c]) : 0.0;
        double f1 = (prec + rec > 0.0) ? 2.0 * prec * rec / (prec + rec) : 0.0;
        m.precision += prec;
        m.recall += rec;
        m.f1 += f1;
    }
    auto k = static_cast<double>(n_classes);
    m.precision /= k;
    m.recall /= k;
    m.f1 /= k;
    return m;
}

}  // namespace dpgda
