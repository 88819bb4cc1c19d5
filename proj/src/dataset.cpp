#include "dpgda/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace dpgda {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

void Dataset::validate() const {
    if (n_features() == 0) throw Error("dataset has no features");
    if (values.size() != n_rows() * n_features())
        throw Error("feature matrix size does not match row count");
    std::unordered_set<std::string> seen;
    for (const auto& name : feature_names) {
        if (!seen.insert(name).second) throw Error("duplicate feature name: " + name);
    }
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= n_classes())
            throw Error("label out of range: " + std::to_string(y));
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw Error("non-finite feature value in dataset");
    }
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open CSV file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw Error("empty CSV file: " + path);
    std::vector<std::string> header = split_line(line);
    for (auto& h : header) h = trim(h);

    std::size_t label_idx = header.size() - 1;
    if (!label_column.empty()) {
        auto it = std::find(header.begin(), header.end(), label_column);
        if (it != header.end()) {
            label_idx = static_cast<std::size_t>(it - header.begin());
        } else {
            // fall back to a numeric column index
            std::size_t idx = 0;
            auto [p, ec] = std::from_chars(label_column.data(),
                                           label_column.data() + label_column.size(), idx);
            if (ec != std::errc{} || p != label_column.data() + label_column.size() ||
                idx >= header.size())
                throw Error("label column not found: " + label_column);
            label_idx = idx;
        }
    }

    Dataset ds;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != label_idx) ds.feature_names.push_back(header[j]);
    }
    if (ds.feature_names.empty()) throw Error("CSV has no feature columns: " + path);

    std::map<std::string, int> class_ids;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw Error(path + ": row " + std::to_string(row_no) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(header.size()));
        for (std::size_t j = 0; j < cells.size(); ++j) {
            std::string cell = trim(cells[j]);
            if (j == label_idx) {
                auto [it, fresh] = class_ids.try_emplace(cell, static_cast<int>(ds.class_names.size()));
                if (fresh) ds.class_names.push_back(cell);
                ds.labels.push_back(it->second);
            } else {
                errno = 0;
                char* end = nullptr;
                double v = std::strtod(cell.c_str(), &end);
                if (end != cell.c_str() + cell.size() || cell.empty() || !std::isfinite(v))
                    throw Error(path + ": cannot parse numeric cell at row " +
                                std::to_string(row_no) + ", column '" + header[j] + "'");
                ds.values.push_back(v);
            }
        }
    }
    if (ds.labels.empty()) throw Error("CSV contains no data rows: " + path);
    ds.validate();
    return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write CSV file: " + path);
    for (std::size_t j = 0; j < ds.n_features(); ++j) out << ds.feature_names[j] << ',';
    out << "class\n";
    char buf[64];
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        auto x = ds.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", x[j]);
            out << buf << ',';
        }
        out << ds.class_names[static_cast<std::size_t>(ds.labels[i])] << '\n';
    }
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error("train fraction must be in (0,1)");
    std::vector<std::vector<std::size_t>> by_class(ds.n_classes());
    for (std::size_t i = 0; i < ds.n_rows(); ++i)
        by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);

    std::vector<bool> in_train(ds.n_rows(), false);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& idx = by_class[c];
        if (idx.empty()) continue;
        if (idx.size() < 2)
            throw Error("class '" + ds.class_names[c] + "' has a single sample; cannot split");
        Rng rng(derive_seed(seed, 0x5714ULL, c));
        rng.shuffle(idx);
        auto take = static_cast<std::size_t>(
            std::ceil(train_fraction * static_cast<double>(idx.size())));
        take = std::clamp<std::size_t>(take, 1, idx.size() - 1);
        for (std::size_t i = 0; i < take; ++i) in_train[idx[i]] = true;
    }

    Dataset train, test;
    train.feature_names = test.feature_names = ds.feature_names;
    train.class_names = test.class_names = ds.class_names;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        (in_train[i] ? train : test).add_row(ds.row(i), ds.labels[i]);
    }
    return {std::move(train), std::move(test)};
}

FeatureStats feature_stats(const Dataset& ds) {
    if (ds.n_rows() == 0) throw Error("feature_stats on empty dataset");
    const std::size_t d = ds.n_features();
    FeatureStats st;
    st.min.assign(d, std::numeric_limits<double>::infinity());
    st.max.assign(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        auto x = ds.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            st.min[j] = std::min(st.min[j], x[j]);
            st.max[j] = std::max(st.max[j], x[j]);
        }
    }
    st.range.resize(d);
    for (std::size_t j = 0; j < d; ++j) st.range[j] = st.max[j] - st.min[j];
    return st;
}

double imbalance_ratio(const Dataset& ds) {
    auto counts = ds.class_counts();
    std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
    std::size_t present = 0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        ++present;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    if (present < 2) throw Error("imbalance_ratio requires at least two classes");
    return static_cast<double>(hi) / static_cast<double>(lo);
}

}  // namespace dpgda
