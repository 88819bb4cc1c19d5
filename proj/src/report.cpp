#include "dpgda/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace dpgda {

namespace {

std::string fmt_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string svg_open(double width, double height) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
                  "width=\"%.0f\" height=\"%.0f\" font-family=\"monospace\" "
                  "font-size=\"11\">\n",
                  width, height);
    return buf;
}

std::string rect(double x, double y, double w, double h, int gray,
                 const std::string& data_value) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                  "fill=\"rgb(%d,%d,255)\" stroke=\"black\" data-value=\"%s\"/>\n",
                  x, y, w, h, gray, gray, data_value.c_str());
    return buf;
}

std::string text(double x, double y, const std::string& s) {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "<text x=\"%.1f\" y=\"%.1f\">%s</text>\n", x, y, s.c_str());
    return buf;
}

bool feature_violated(const TraceRecord& rec, std::size_t feature) {
    for (const BoundViolation& v : rec.violated)
        if (v.feature == feature) return true;
    return false;
}

void check_trace(const std::vector<TraceRecord>& trace,
                 const std::vector<std::string>& feature_names) {
    if (trace.empty()) throw Error("empty trace");
    for (const TraceRecord& rec : trace)
        if (rec.delta.size() != feature_names.size())
            throw Error("trace and feature names disagree on dimensionality");
}

}  // namespace

std::string delta_table_csv(const std::vector<TraceRecord>& trace,
                            const std::vector<std::string>& feature_names) {
    check_trace(trace, feature_names);
    std::string out = "feature";
    for (const TraceRecord& rec : trace)
        out += ",delta_g" + std::to_string(rec.generation);
    out += "\n";
    for (std::size_t f = 0; f < feature_names.size(); ++f) {
        out += feature_names[f];
        for (const TraceRecord& rec : trace) {
            out += "," + fmt_exact(rec.delta[f]);
            if (feature_violated(rec, f)) out += "(x)";
        }
        out += "\n";
    }
    return out;
}

Figure evolution_heatmap(const std::vector<TraceRecord>& trace,
                         const std::vector<std::string>& feature_names) {
    check_trace(trace, feature_names);
    const std::size_t d = feature_names.size();
    const std::size_t g = trace.size();
    double max_abs = 0.0;
    for (const TraceRecord& rec : trace)
        for (double v : rec.delta) max_abs = std::max(max_abs, std::abs(v));

    const double cell = 28.0, left = 140.0, top = 30.0;
    Figure fig;
    fig.svg = svg_open(left + cell * static_cast<double>(g) + 20.0,
                       top + cell * static_cast<double>(d) + 20.0);
    for (std::size_t col = 0; col < g; ++col)
        fig.svg += text(left + cell * static_cast<double>(col) + 4.0, top - 8.0,
                        "g" + std::to_string(trace[col].generation));
    fig.csv = "feature";
    for (const TraceRecord& rec : trace) fig.csv += ",delta_g" + std::to_string(rec.generation);
    fig.csv += "\n";
    for (std::size_t f = 0; f < d; ++f) {
        fig.svg += text(4.0, top + cell * static_cast<double>(f) + 18.0, feature_names[f]);
        fig.csv += feature_names[f];
        for (std::size_t col = 0; col < g; ++col) {
            double v = trace[col].delta[f];
            double intensity = max_abs > 0.0 ? std::abs(v) / max_abs : 0.0;
            int gray = static_cast<int>(std::lround(255.0 * (1.0 - intensity)));
            fig.svg += rect(left + cell * static_cast<double>(col),
                            top + cell * static_cast<double>(f), cell, cell, gray, fmt_exact(v));
            fig.csv += "," + fmt_exact(v);
        }
        fig.csv += "\n";
    }
    fig.svg += "</svg>\n";
    return fig;
}

Figure cumulative_change_barplot(const std::vector<TraceRecord>& trace,
                                 const std::vector<std::string>& feature_names) {
    check_trace(trace, feature_names);
    const std::size_t d = feature_names.size();
    std::vector<double> change(d, 0.0);
    std::vector<std::size_t> moved(d, 0);
    for (std::size_t f = 0; f < d; ++f) {
        // deltas telescope, so the sum is exactly final minus initial
        double total = 0.0;
        for (const TraceRecord& rec : trace) {
            total += rec.delta[f];
            if (rec.delta[f] != 0.0) ++moved[f];
        }
        change[f] = std::abs(total);
    }
    double max_change = *std::max_element(change.begin(), change.end());

    const double row_h = 26.0, left = 140.0, top = 40.0, bar_max = 320.0;
    Figure fig;
    fig.svg = svg_open(left + bar_max + 180.0, top + row_h * static_cast<double>(d) + 20.0);
    fig.svg += text(left, 20.0, "query &#8594; augmented");
    fig.csv = "feature,abs_change,generations_changed\n";
    for (std::size_t f = 0; f < d; ++f) {
        double y = top + row_h * static_cast<double>(f);
        double len = max_change > 0.0 ? bar_max * change[f] / max_change : 0.0;
        fig.svg += text(4.0, y + 16.0, feature_names[f]);
        fig.svg += rect(left, y + 4.0, len, row_h - 10.0, 120, fmt_exact(change[f]));
        fig.svg += text(left + len + 6.0, y + 16.0,
                        fmt_label(change[f]) + " (" + std::to_string(moved[f]) + " gen)");
        fig.csv += feature_names[f] + "," + fmt_exact(change[f]) + "," +
                   std::to_string(moved[f]) + "\n";
    }
    fig.svg += "</svg>\n";
    return fig;
}

Figure violation_heatmap(const std::vector<BenchResult>& results) {
    if (results.empty()) throw Error("violation_heatmap: no results");
    std::vector<std::string> methods, datasets;
    std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> cells;
    for (const BenchResult& r : results) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
        if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end())
            datasets.push_back(r.dataset);
        if (r.failed) continue;
        auto& cell = cells[{r.method, r.dataset}];
        cell.first += r.violation_rate;
        cell.second += 1;
    }

    const double cw = 84.0, ch = 26.0, left = 110.0, top = 34.0;
    Figure fig;
    fig.svg = svg_open(left + cw * static_cast<double>(datasets.size()) + 20.0,
                       top + ch * static_cast<double>(methods.size()) + 20.0);
    fig.csv = "method";
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        fig.csv += "," + datasets[di];
        fig.svg += text(left + cw * static_cast<double>(di) + 4.0, top - 8.0, datasets[di]);
    }
    fig.csv += "\n";
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        fig.svg += text(4.0, top + ch * static_cast<double>(mi) + 17.0, methods[mi]);
        fig.csv += methods[mi];
        for (std::size_t di = 0; di < datasets.size(); ++di) {
            auto it = cells.find({methods[mi], datasets[di]});
            double rate = 0.0;
            if (it != cells.end() && it->second.second > 0)
                rate = it->second.first / static_cast<double>(it->second.second);
            int gray = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(rate, 0.0, 1.0))));
            double x = left + cw * static_cast<double>(di);
            double y = top + ch * static_cast<double>(mi);
            fig.svg += rect(x, y, cw, ch, gray, fmt_exact(rate));
            fig.svg += text(x + 4.0, y + 17.0, fmt_label(rate));
            fig.csv += "," + fmt_exact(rate);
        }
        fig.csv += "\n";
    }
    fig.svg += "</svg>\n";
    return fig;
}

}  // namespace dpgda
