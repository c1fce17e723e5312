#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vbdp/dataset.hpp"

using namespace vbdp;
namespace fs = std::filesystem;

namespace {

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& name) {
        path = fs::temp_directory_path() / ("vbdp_test_" + name);
    }
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
    void write(const std::string& content) {
        std::ofstream out(path);
        out << content;
    }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("load_csv basic") {
    TempFile f("basic.csv");
    f.write("1,2,A\n3,4,B\n");
    CsvOptions opts;
    opts.positive_label = "A";
    auto ds = load_csv(f.str(), opts);
    CHECK(ds.instance_count() == 2);
    CHECK(ds.feature_count() == 2);
    CHECK(ds.labels == std::vector<int>{1, 0});
    CHECK(ds.features[0] == Vector{1, 2});
    CHECK(ds.features[1] == Vector{3, 4});
}

TEST_CASE("load_csv parse error names the cell") {
    TempFile f("bad.csv");
    f.write("1,x,A\n3,4,B\n");
    CsvOptions opts;
    opts.positive_label = "A";
    CHECK_THROWS_WITH_AS(load_csv(f.str(), opts), doctest::Contains("row 0"), std::runtime_error);
}

TEST_CASE("load_csv rejects more than two classes") {
    TempFile f("three.csv");
    f.write("1,A\n2,B\n3,C\n");
    CsvOptions opts;
    opts.positive_label = "A";
    CHECK_THROWS_AS(load_csv(f.str(), opts), std::runtime_error);
}

TEST_CASE("load_csv header name selection") {
    TempFile f("header.csv");
    f.write("x,y,outcome\n1,2,yes\n3,4,no\n");
    CsvOptions opts;
    opts.has_header = true;
    opts.label_column = "outcome";
    opts.positive_label = "yes";
    auto ds = load_csv(f.str(), opts);
    CHECK(ds.labels == std::vector<int>{1, 0});
}

TEST_CASE("csv round-trip preserves values and labels") {
    Rng rng(7);
    LabeledDataset ds;
    for (int i = 0; i < 20; ++i) {
        Vector row;
        for (int j = 0; j < 4; ++j) row.push_back(rng.uniform(-100, 100));
        ds.features.push_back(row);
        ds.labels.push_back(i % 3 == 0 ? 1 : 0);
    }
    TempFile f("roundtrip.csv");
    save_csv(f.str(), ds.features, &ds.labels, "round trip test");
    CsvOptions opts;
    opts.label_column = "-1";
    opts.positive_label = "1";
    auto back = load_csv(f.str(), opts);
    REQUIRE(back.instance_count() == ds.instance_count());
    CHECK(back.labels == ds.labels);
    for (size_t i = 0; i < ds.features.size(); ++i)
        for (size_t j = 0; j < ds.features[i].size(); ++j)
            CHECK(back.features[i][j] == ds.features[i][j]);  // full precision
}

TEST_CASE("minmax normalization") {
    Matrix col{{2}, {4}, {6}};
    auto stats = fit_minmax(col);
    auto out = apply_minmax(stats, col);
    CHECK(out[0][0] == 0.0);
    CHECK(out[1][0] == 0.5);
    CHECK(out[2][0] == 1.0);

    SUBCASE("constant column maps to zero") {
        Matrix c{{5}, {5}};
        auto s = fit_minmax(c);
        auto o = apply_minmax(s, c);
        CHECK(o[0][0] == 0.0);
        CHECK(o[1][0] == 0.0);
        CHECK(s.constant[0]);
    }
    SUBCASE("out-of-range values clamp") {
        CHECK(apply_minmax(stats, Vector{8})[0] == 1.0);
        CHECK(apply_minmax(stats, Vector{0})[0] == 0.0);
    }
    SUBCASE("fitting set maps into [0,1] exactly") {
        Rng rng(3);
        Matrix m(30, Vector(5));
        for (auto& r : m)
            for (auto& v : r) v = rng.uniform(-50, 50);
        auto s = fit_minmax(m);
        for (const auto& r : apply_minmax(s, m))
            for (double v : r) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
    }
}

TEST_CASE("split_binary") {
    LabeledDataset ds;
    for (int i = 0; i < 7; ++i) {
        ds.features.push_back({double(i)});
        ds.labels.push_back(i < 3 ? 1 : 0);
    }
    auto s = split_binary(ds);
    CHECK(s.minority.size() == 3);
    CHECK(s.majority.size() == 4);

    SUBCASE("tie goes to the positive class") {
        LabeledDataset tie;
        tie.features = {{1}, {2}};
        tie.labels = {1, 0};
        auto t = split_binary(tie);
        CHECK(t.minority[0][0] == 1.0);  // label-1 row
    }
    SUBCASE("single class is an error") {
        LabeledDataset bad;
        bad.features = {{1}, {2}};
        bad.labels = {0, 0};
        CHECK_THROWS_AS(split_binary(bad), std::invalid_argument);
    }
}

TEST_CASE("centroid") {
    CHECK(centroid({{0, 0}, {2, 2}}) == Vector{1, 1});
    CHECK(centroid({{3, -1}}) == Vector{3, -1});
    auto c = centroid({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
    CHECK(c[0] == doctest::Approx(0.0));
    CHECK(c[1] == doctest::Approx(0.0));
    CHECK_THROWS_AS(centroid({}), std::invalid_argument);

    SUBCASE("duplicating the multiset leaves the centroid unchanged") {
        Matrix s{{1.5, 2.5}, {-3, 4}, {0.25, 9}};
        Matrix doubled = s;
        doubled.insert(doubled.end(), s.begin(), s.end());
        auto a = centroid(s);
        auto b = centroid(doubled);
        for (size_t j = 0; j < a.size(); ++j) CHECK(a[j] == doctest::Approx(b[j]));
    }
}

TEST_CASE("stratified_kfold balanced 5x(1+1)") {
    LabeledDataset ds;
    for (int i = 0; i < 10; ++i) {
        ds.features.push_back({double(i)});
        ds.labels.push_back(i < 5 ? 1 : 0);
    }
    auto plan = stratified_kfold(ds, 5, 11);
    // enumerate assignments and count per-fold labels
    std::vector<int> pos(5, 0), neg(5, 0);
    for (size_t i = 0; i < 10; ++i)
        (ds.labels[i] == 1 ? pos : neg)[static_cast<size_t>(plan.assignments[i])]++;
    for (int f = 0; f < 5; ++f) {
        CHECK(pos[static_cast<size_t>(f)] == 1);
        CHECK(neg[static_cast<size_t>(f)] == 1);
    }

    SUBCASE("same seed is deterministic") {
        auto again = stratified_kfold(ds, 5, 11);
        CHECK(again.assignments == plan.assignments);
    }
    SUBCASE("k larger than class size is an error") {
        CHECK_THROWS_AS(stratified_kfold(ds, 11, 0), std::invalid_argument);
    }
}

TEST_CASE("stratification property on random datasets") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 30 + static_cast<int>(rng.uniform_index(70));
        const int k = 2 + static_cast<int>(rng.uniform_index(8));
        LabeledDataset ds;
        int n_pos = 0;
        for (int i = 0; i < n; ++i) {
            ds.features.push_back({rng.uniform()});
            int lab = rng.uniform() < 0.3 ? 1 : 0;
            n_pos += lab;
            ds.labels.push_back(lab);
        }
        if (n_pos < k || n - n_pos < k) continue;
        auto plan = stratified_kfold(ds, k, 1000 + static_cast<uint64_t>(trial));
        std::vector<int> pos(static_cast<size_t>(k), 0), sizes(static_cast<size_t>(k), 0);
        for (int i = 0; i < n; ++i) {
            sizes[static_cast<size_t>(plan.assignments[static_cast<size_t>(i)])]++;
            if (ds.labels[static_cast<size_t>(i)] == 1)
                pos[static_cast<size_t>(plan.assignments[static_cast<size_t>(i)])]++;
        }
        const int target = static_cast<int>(std::ceil(double(n_pos) / k));
        for (int f = 0; f < k; ++f) {
            CHECK(std::abs(pos[static_cast<size_t>(f)] - target) <= 1);
        }
        auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
        CHECK(*mx - *mn <= 1);
    }
}

namespace {

void write_idx_pair(const fs::path& img, const fs::path& lab, uint32_t n, uint32_t rows,
                    uint32_t cols, bool corrupt_magic = false) {
    auto be32 = [](std::ofstream& o, uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
        o.write(reinterpret_cast<char*>(b), 4);
    };
    std::ofstream oi(img, std::ios::binary);
    be32(oi, corrupt_magic ? 0xdeadbeef : 0x00000803u);
    be32(oi, n);
    be32(oi, rows);
    be32(oi, cols);
    for (uint32_t i = 0; i < n * rows * cols; ++i) {
        char px = static_cast<char>(i % 256);
        oi.write(&px, 1);
    }
    std::ofstream ol(lab, std::ios::binary);
    be32(ol, 0x00000801u);
    be32(ol, n);
    for (uint32_t i = 0; i < n; ++i) {
        char d = static_cast<char>(i % 10);
        ol.write(&d, 1);
    }
}

}  // namespace

TEST_CASE("load_idx") {
    TempFile img("t.idx3"), lab("t.idx1");
    write_idx_pair(img.path, lab.path, 12, 4, 4);

    SUBCASE("limit caps the row count, values in [0,1]") {
        auto ds = load_idx(img.str(), lab.str(), 5);
        CHECK(ds.instance_count() == 5);
        CHECK(ds.feature_count() == 16);
        for (const auto& row : ds.features)
            for (double v : row) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
    }
    SUBCASE("limit larger than the file reads everything") {
        auto ds = load_idx(img.str(), lab.str(), 1000);
        CHECK(ds.instance_count() == 12);
    }
    SUBCASE("corrupted header is a format error") {
        TempFile bad("bad.idx3");
        write_idx_pair(bad.path, lab.path, 12, 4, 4, /*corrupt_magic=*/true);
        CHECK_THROWS_WITH_AS(load_idx(bad.str(), lab.str(), 5), doctest::Contains("magic"),
                             std::runtime_error);
    }
}
