#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "vbdp/eval.hpp"

using namespace vbdp;

namespace {

// imbalanced two-cluster dataset with some overlap
LabeledDataset make_imbalanced(size_t n_min, size_t n_maj, uint64_t seed) {
    Rng rng(seed);
    LabeledDataset ds;
    for (size_t i = 0; i < n_min; ++i) {
        ds.features.push_back({0.3 + 0.15 * rng.gaussian(), 0.3 + 0.15 * rng.gaussian()});
        ds.labels.push_back(1);
    }
    for (size_t i = 0; i < n_maj; ++i) {
        ds.features.push_back({0.7 + 0.15 * rng.gaussian(), 0.7 + 0.15 * rng.gaussian()});
        ds.labels.push_back(0);
    }
    return ds;
}

double auc_pair_oracle(const std::vector<int>& y, const Vector& s) {
    double wins = 0;
    size_t pairs = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1) continue;
        for (size_t j = 0; j < y.size(); ++j) {
            if (y[j] != 0) continue;
            ++pairs;
            if (s[i] > s[j]) wins += 1;
            else if (s[i] == s[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("confusion") {
    std::vector<int> yt{1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
    std::vector<int> yp{1, 1, 0, 1, 0, 0, 0, 0, 0, 0};
    auto m = confusion(yt, yp);
    CHECK(m.tp == 2);
    CHECK(m.fn == 1);
    CHECK(m.fp == 1);
    CHECK(m.tn == 6);
    CHECK(m.total() == 10);

    SUBCASE("identity prediction") {
        auto id = confusion(yt, yt);
        CHECK(id.fn == 0);
        CHECK(id.fp == 0);
    }
    SUBCASE("complement prediction") {
        std::vector<int> comp;
        for (int v : yt) comp.push_back(1 - v);
        auto c = confusion(yt, comp);
        CHECK(c.tp == 0);
        CHECK(c.tn == 0);
    }
    SUBCASE("length mismatch is an error") {
        CHECK_THROWS_AS(confusion({1}, {1, 0}), std::invalid_argument);
    }
}

TEST_CASE("precision_recall_f1") {
    ConfusionMatrix m;
    m.tp = 2;
    m.fn = 1;
    m.fp = 1;
    m.tn = 6;
    auto r = precision_recall_f1(m);
    CHECK(r.precision == doctest::Approx(2.0 / 3.0));
    CHECK(r.recall == doctest::Approx(2.0 / 3.0));
    CHECK(r.f1 == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(r.degenerate);

    SUBCASE("degenerate zero-prediction case") {
        ConfusionMatrix z;
        z.fn = 3;
        z.tn = 7;
        auto rz = precision_recall_f1(z);
        CHECK(rz.precision == 0.0);
        CHECK(rz.degenerate);
    }
    SUBCASE("perfect matrix") {
        ConfusionMatrix p;
        p.tp = 4;
        p.tn = 6;
        auto rp = precision_recall_f1(p);
        CHECK(rp.precision == 1.0);
        CHECK(rp.recall == 1.0);
        CHECK(rp.f1 == 1.0);
    }
    SUBCASE("exhaustive oracle over all matrices with total <= 20") {
        for (long tp = 0; tp <= 20; ++tp)
            for (long fn = 0; tp + fn <= 20; ++fn)
                for (long fp = 0; tp + fn + fp <= 20; ++fp) {
                    long tn = 20 - tp - fn - fp;
                    ConfusionMatrix cm;
                    cm.tp = tp;
                    cm.fn = fn;
                    cm.fp = fp;
                    cm.tn = tn;
                    auto got = precision_recall_f1(cm);
                    double prec = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
                    double rec = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
                    double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
                    CHECK(got.precision == doctest::Approx(prec));
                    CHECK(got.recall == doctest::Approx(rec));
                    CHECK(got.f1 == doctest::Approx(f1));
                }
    }
}

TEST_CASE("roc_auc") {
    SUBCASE("perfect ranking") {
        CHECK(roc_auc({0, 0, 1, 1}, {0.1, 0.2, 0.8, 0.9}) == doctest::Approx(1.0));
    }
    SUBCASE("all ties give 0.5") {
        CHECK(roc_auc({0, 1, 0, 1}, {0.5, 0.5, 0.5, 0.5}) == doctest::Approx(0.5));
    }
    SUBCASE("6-point mixed case equals pair counting") {
        std::vector<int> y{1, 0, 1, 0, 1, 0};
        Vector s{0.9, 0.8, 0.8, 0.3, 0.2, 0.1};
        CHECK(roc_auc(y, s) == doctest::Approx(auc_pair_oracle(y, s)));
    }
    SUBCASE("random small cases match the O(n^2) oracle") {
        Rng rng(50);
        for (int trial = 0; trial < 50; ++trial) {
            size_t n = 2 + rng.uniform_index(11);
            std::vector<int> y;
            Vector s;
            bool has0 = false, has1 = false;
            for (size_t i = 0; i < n; ++i) {
                int lab = static_cast<int>(rng.uniform_index(2));
                (lab ? has1 : has0) = true;
                y.push_back(lab);
                // quantized scores to exercise the tie path
                s.push_back(std::floor(rng.uniform() * 4) / 4.0);
            }
            if (!has0 || !has1) continue;
            CHECK(roc_auc(y, s) == doctest::Approx(auc_pair_oracle(y, s)).epsilon(1e-12));
        }
    }
    SUBCASE("single class is an error") {
        CHECK_THROWS_AS(roc_auc({1, 1}, {0.5, 0.6}), std::invalid_argument);
    }
}

TEST_CASE("run_cv_experiment") {
    auto data = make_imbalanced(15, 45, 3);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::logistic;
    spec.epochs = 60;

    SUBCASE("method none is a plain classifier run with sane metrics") {
        auto r = run_cv_experiment(data, Method::none, spec, 5, 42);
        CHECK(r.folds.size() == 5);
        CHECK(r.mean.auc > 0.7);  // clusters are mostly separable
        for (const auto& f : r.folds) {
            CHECK(f.precision >= 0.0);
            CHECK(f.precision <= 1.0);
            CHECK(f.auc >= 0.0);
            CHECK(f.auc <= 1.0);
        }
    }
    SUBCASE("identical seeds give bit-identical results for every method") {
        for (auto method : {Method::none, Method::smote, Method::random_oversample,
                            Method::cross_concat}) {
            auto a = run_cv_experiment(data, method, spec, 5, 42);
            auto b = run_cv_experiment(data, method, spec, 5, 42);
            CHECK(a.to_json() == b.to_json());
        }
    }
    SUBCASE("no leakage: test folds are disjoint from fit rows and partition the data") {
        CvTrace trace;
        CvConfig cfg;
        cfg.k = 5;
        cfg.seed = 42;
        cfg.method_seed = 42;
        cfg.trace = &trace;
        run_cv_experiment(data, Method::smote, spec, cfg);
        std::vector<int> seen(data.instance_count(), 0);
        for (int fold = 0; fold < 5; ++fold) {
            for (size_t row : trace.test_rows[static_cast<size_t>(fold)]) {
                seen[row]++;
                for (size_t fit : trace.fit_rows[static_cast<size_t>(fold)]) CHECK(fit != row);
            }
            CHECK(trace.fit_rows[static_cast<size_t>(fold)].size() +
                      trace.test_rows[static_cast<size_t>(fold)].size() ==
                  data.instance_count());
        }
        for (int count : seen) CHECK(count == 1);
    }
    SUBCASE("parallel folds match the sequential result") {
        CvConfig seq, par;
        seq.k = par.k = 5;
        seq.seed = par.seed = 7;
        seq.method_seed = par.method_seed = 7;
        par.jobs = 4;
        auto a = run_cv_experiment(data, Method::cross_concat, spec, seq);
        auto b = run_cv_experiment(data, Method::cross_concat, spec, par);
        CHECK(a.to_json() == b.to_json());
    }
}

TEST_CASE("stability_probe") {
    // heavy overlap so resampled training sets actually move the decision
    // boundary across the test points
    Rng rng(9);
    LabeledDataset data;
    for (int i = 0; i < 16; ++i) {
        data.features.push_back({0.45 + 0.25 * rng.gaussian(), 0.45 + 0.25 * rng.gaussian()});
        data.labels.push_back(1);
    }
    for (int i = 0; i < 48; ++i) {
        data.features.push_back({0.55 + 0.25 * rng.gaussian(), 0.55 + 0.25 * rng.gaussian()});
        data.labels.push_back(0);
    }
    ClassifierSpec spec;
    spec.kind = ClassifierKind::logistic;
    spec.epochs = 40;

    SUBCASE("cross_concat variance is exactly zero") {
        auto rep = stability_probe(data, Method::cross_concat, spec, 3, 42, 4);
        CHECK(rep.precision_var == 0.0);
        CHECK(rep.recall_var == 0.0);
        CHECK(rep.f1_var == 0.0);
        CHECK(rep.auc_var == 0.0);
    }
    SUBCASE("smote varies with its seed") {
        auto rep = stability_probe(data, Method::smote, spec, 8, 42, 4);
        double total = rep.precision_var + rep.recall_var + rep.f1_var + rep.auc_var;
        CHECK(total > 0.0);
    }
    SUBCASE("repeats < 2 is an error") {
        CHECK_THROWS_AS(stability_probe(data, Method::none, spec, 1, 0, 4),
                        std::invalid_argument);
    }
}

TEST_CASE("ExperimentResult serialization") {
    auto data = make_imbalanced(10, 30, 1);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::naive_bayes;
    auto r = run_cv_experiment(data, Method::none, spec, 4, 8);
    auto text = r.to_json("vbdp test", "{\"k\":4}");
    CHECK(text.find("\"folds\"") != std::string::npos);
    CHECK(text.find("\"tool_version\"") != std::string::npos);

    std::string path = "/tmp/vbdp_test_folds.csv";
    r.save_folds_csv(path, "meta");
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# meta");
    std::getline(in, line);
    CHECK(line == "fold,precision,recall,f1,auc,degenerate");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
    std::remove(path.c_str());
}
