#include "vbdp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace vbdp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& raw, size_t row, size_t col) {
    const std::string s = trim(raw);
    size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("csv parse error at row " + std::to_string(row) +
                                 ", column " + std::to_string(col) + ": '" + s + "'");
    }
    if (pos != s.size() || !std::isfinite(v))
        throw std::runtime_error("csv parse error at row " + std::to_string(row) +
                                 ", column " + std::to_string(col) + ": '" + s + "'");
    return v;
}

uint32_t read_be32(std::istream& in, const std::string& what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("idx: truncated " + what);
    return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

}  // namespace

void LabeledDataset::validate() const {
    if (features.size() != labels.size())
        throw std::invalid_argument("dataset: feature/label count mismatch");
    const size_t d = feature_count();
    for (size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != d)
            throw std::invalid_argument("dataset: ragged row " + std::to_string(i));
        for (double v : features[i])
            if (!std::isfinite(v))
                throw std::invalid_argument("dataset: non-finite value in row " + std::to_string(i));
        if (labels[i] != 0 && labels[i] != 1)
            throw std::invalid_argument("dataset: non-binary label in row " + std::to_string(i));
    }
}

LabeledDataset load_csv(const std::string& path, const CsvOptions& opts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string line;
    size_t lineno = 0;
    bool header_pending = opts.has_header;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || line[0] == '#') continue;
        auto cells = split_line(line);
        if (header_pending) {
            for (auto& c : cells) c = trim(c);
            header = cells;
            header_pending = false;
            continue;
        }
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw std::invalid_argument("csv: no data rows in " + path);

    const size_t width = rows[0].size();
    long label_idx = -1;
    if (!header.empty()) {
        auto it = std::find(header.begin(), header.end(), opts.label_column);
        if (it != header.end()) label_idx = it - header.begin();
    }
    if (label_idx < 0) {
        try {
            label_idx = std::stol(opts.label_column);
        } catch (const std::exception&) {
            throw std::runtime_error("csv: label column '" + opts.label_column + "' not found");
        }
        if (label_idx < 0) label_idx += static_cast<long>(width);
    }
    if (label_idx < 0 || label_idx >= static_cast<long>(width))
        throw std::runtime_error("csv: label column out of range");

    std::set<std::string> distinct;
    for (const auto& r : rows) distinct.insert(trim(r[static_cast<size_t>(label_idx)]));
    if (distinct.size() != 2)
        throw std::runtime_error("csv: label column must have exactly 2 distinct values, got " +
                                 std::to_string(distinct.size()));
    if (!distinct.count(opts.positive_label))
        throw std::runtime_error("csv: positive label '" + opts.positive_label + "' not present");

    LabeledDataset ds;
    ds.features.reserve(rows.size());
    ds.labels.reserve(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != width)
            throw std::runtime_error("csv: row " + std::to_string(i) + " has " +
                                     std::to_string(rows[i].size()) + " cells, expected " +
                                     std::to_string(width));
        Vector feat;
        feat.reserve(width - 1);
        for (size_t j = 0; j < width; ++j) {
            if (j == static_cast<size_t>(label_idx)) continue;
            feat.push_back(parse_cell(rows[i][j], i, j));
        }
        ds.features.push_back(std::move(feat));
        ds.labels.push_back(trim(rows[i][static_cast<size_t>(label_idx)]) == opts.positive_label ? 1 : 0);
    }
    ds.validate();
    return ds;
}

void save_csv(const std::string& path, const Matrix& features, const std::vector<int>* labels,
              const std::string& metadata) {
    if (labels && labels->size() != features.size())
        throw std::invalid_argument("save_csv: label count mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    if (!metadata.empty()) out << "# " << metadata << "\n";
    char buf[40];
    for (size_t i = 0; i < features.size(); ++i) {
        for (size_t j = 0; j < features[i].size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", features[i][j]);
            if (j) out << ',';
            out << buf;
        }
        if (labels) out << ',' << (*labels)[i];
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    Matrix m;
    std::string line;
    size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty() || line[0] == '#') continue;
        auto cells = split_line(line);
        Vector v;
        v.reserve(cells.size());
        for (size_t j = 0; j < cells.size(); ++j) v.push_back(parse_cell(cells[j], row, j));
        if (!m.empty() && v.size() != m[0].size())
            throw std::runtime_error("csv: ragged row " + std::to_string(row));
        m.push_back(std::move(v));
        ++row;
    }
    if (m.empty()) throw std::invalid_argument("csv: no data rows in " + path);
    return m;
}

LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path,
                        size_t limit) {
    if (limit < 1) throw std::invalid_argument("load_idx: limit must be >= 1");
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("cannot open file: " + images_path);
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("cannot open file: " + labels_path);

    if (read_be32(img, "image magic") != 0x00000803u)
        throw std::runtime_error("idx: bad image magic number in " + images_path);
    if (read_be32(lab, "label magic") != 0x00000801u)
        throw std::runtime_error("idx: bad label magic number in " + labels_path);

    const uint32_t n_img = read_be32(img, "image count");
    const uint32_t rows = read_be32(img, "row count");
    const uint32_t cols = read_be32(img, "column count");
    const uint32_t n_lab = read_be32(lab, "label count");
    if (n_img != n_lab) throw std::runtime_error("idx: image/label count mismatch");

    const size_t n = std::min<size_t>(limit, n_img);
    const size_t d = size_t(rows) * cols;

    LabeledDataset ds;
    ds.features.reserve(n);
    ds.labels.reserve(n);
    std::vector<unsigned char> px(d);
    for (size_t i = 0; i < n; ++i) {
        img.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(d));
        if (!img) throw std::runtime_error("idx: truncated image payload");
        char digit = 0;
        lab.read(&digit, 1);
        if (!lab) throw std::runtime_error("idx: truncated label payload");
        Vector v(d);
        for (size_t j = 0; j < d; ++j) v[j] = px[j] / 255.0;
        ds.features.push_back(std::move(v));
        // digit 0 is kept as the positive class; other digits map to 0 so the
        // binary-label invariant holds for image data too
        ds.labels.push_back(digit == 0 ? 1 : 0);
    }
    return ds;
}

NormalizationStats fit_minmax(const Matrix& data) {
    if (data.empty()) throw std::invalid_argument("fit_minmax: empty data");
    const size_t d = data[0].size();
    NormalizationStats s;
    s.min.assign(d, std::numeric_limits<double>::infinity());
    s.max.assign(d, -std::numeric_limits<double>::infinity());
    for (const auto& row : data) {
        if (row.size() != d) throw std::invalid_argument("fit_minmax: ragged data");
        for (size_t j = 0; j < d; ++j) {
            s.min[j] = std::min(s.min[j], row[j]);
            s.max[j] = std::max(s.max[j], row[j]);
        }
    }
    s.constant.resize(d);
    for (size_t j = 0; j < d; ++j) s.constant[j] = (s.max[j] == s.min[j]);
    return s;
}

Vector apply_minmax(const NormalizationStats& stats, const Vector& row) {
    if (row.size() != stats.min.size())
        throw std::invalid_argument("apply_minmax: dimension mismatch");
    Vector out(row.size());
    for (size_t j = 0; j < row.size(); ++j) {
        if (stats.constant[j]) {
            out[j] = 0.0;
        } else {
            double v = (row[j] - stats.min[j]) / (stats.max[j] - stats.min[j]);
            out[j] = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

Matrix apply_minmax(const NormalizationStats& stats, const Matrix& data) {
    Matrix out;
    out.reserve(data.size());
    for (const auto& row : data) out.push_back(apply_minmax(stats, row));
    return out;
}

std::pair<NormalizationStats, LabeledDataset> fit_apply_minmax(const LabeledDataset& fit_on,
                                                               const LabeledDataset& apply_to) {
    if (fit_on.feature_count() != apply_to.feature_count())
        throw std::invalid_argument("fit_apply_minmax: dimension mismatch");
    NormalizationStats stats = fit_minmax(fit_on.features);
    LabeledDataset out;
    out.features = apply_minmax(stats, apply_to.features);
    out.labels = apply_to.labels;
    return {std::move(stats), std::move(out)};
}

BinarySplit split_binary(const LabeledDataset& data) {
    Matrix pos, neg;
    for (size_t i = 0; i < data.instance_count(); ++i)
        (data.labels[i] == 1 ? pos : neg).push_back(data.features[i]);
    if (pos.empty() || neg.empty())
        throw std::invalid_argument("split_binary: both classes must be non-empty");
    BinarySplit s;
    if (pos.size() <= neg.size()) {  // tie: positive class is minority
        s.minority = std::move(pos);
        s.majority = std::move(neg);
    } else {
        s.minority = std::move(neg);
        s.majority = std::move(pos);
    }
    return s;
}

Vector centroid(const Matrix& instances) {
    if (instances.empty()) throw std::invalid_argument("centroid: empty set");
    const size_t d = instances[0].size();
    Vector c(d, 0.0);
    for (const auto& row : instances) {
        if (row.size() != d) throw std::invalid_argument("centroid: ragged set");
        for (size_t j = 0; j < d; ++j) c[j] += row[j];
    }
    for (size_t j = 0; j < d; ++j) c[j] /= static_cast<double>(instances.size());
    return c;
}

FoldPlan stratified_kfold(const LabeledDataset& data, int k, uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_kfold: k must be >= 2");
    std::vector<size_t> pos, neg;
    for (size_t i = 0; i < data.instance_count(); ++i)
        (data.labels[i] == 1 ? pos : neg).push_back(i);
    if (pos.size() < static_cast<size_t>(k) || neg.size() < static_cast<size_t>(k))
        throw std::invalid_argument("stratified_kfold: each class needs at least k members");

    FoldPlan plan;
    plan.k = k;
    plan.assignments.assign(data.instance_count(), -1);
    Rng rng(derive_seed(seed, "kfold", 0));
    // shuffle within class, then deal both classes through one continuing
    // round-robin: per-fold class counts stay within 1 of the global
    // proportion and total fold sizes differ by at most 1
    size_t next = 0;
    for (auto* cls : {&pos, &neg}) {
        rng.shuffle(*cls);
        for (size_t idx : *cls)
            plan.assignments[idx] = static_cast<int>(next++ % static_cast<size_t>(k));
    }
    return plan;
}

}  // namespace vbdp
