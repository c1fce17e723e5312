#include "vbdp/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "vbdp/crossconcat.hpp"
#include "vbdp/resample.hpp"

namespace vbdp {

std::string to_string(Method m) {
    switch (m) {
        case Method::none: return "none";
        case Method::smote: return "smote";
        case Method::random_oversample: return "random_oversample";
        case Method::cross_concat: return "cross_concat";
    }
    throw std::logic_error("unknown method");
}

Method method_from_string(const std::string& name) {
    if (name == "none") return Method::none;
    if (name == "smote") return Method::smote;
    if (name == "random_oversample") return Method::random_oversample;
    if (name == "cross_concat") return Method::cross_concat;
    throw std::invalid_argument("unknown method: " + name);
}

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("confusion: length mismatch");
    ConfusionMatrix m;
    for (size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1)
            (y_pred[i] == 1 ? m.tp : m.fn)++;
        else
            (y_pred[i] == 1 ? m.fp : m.tn)++;
    }
    return m;
}

Prf precision_recall_f1(const ConfusionMatrix& m) {
    Prf r;
    if (m.tp + m.fp == 0) {
        r.precision = 0;
        r.degenerate = true;
    } else {
        r.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    }
    if (m.tp + m.fn == 0) {
        r.recall = 0;
        r.degenerate = true;
    } else {
        r.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    }
    if (r.precision + r.recall == 0) {
        r.f1 = 0;
        r.degenerate = true;
    } else {
        r.f1 = 2.0 * r.recall * r.precision / (r.recall + r.precision);
    }
    return r;
}

double roc_auc(const std::vector<int>& y_true, const Vector& scores) {
    if (y_true.size() != scores.size()) throw std::invalid_argument("roc_auc: length mismatch");
    size_t n_pos = 0, n_neg = 0;
    for (int y : y_true) (y == 1 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("roc_auc: both classes must be present");

    // rank sum with midranks for ties
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });
    double rank_sum_pos = 0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (size_t t = i; t < j; ++t)
            if (y_true[order[t]] == 1) rank_sum_pos += midrank;
        i = j;
    }
    double u = rank_sum_pos - static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

MetricsReport fold_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                           const Vector& scores) {
    MetricsReport r;
    Prf prf = precision_recall_f1(confusion(y_true, y_pred));
    r.precision = prf.precision;
    r.recall = prf.recall;
    r.f1 = prf.f1;
    r.degenerate = prf.degenerate;
    bool has_pos = false, has_neg = false;
    for (int y : y_true) (y == 1 ? has_pos : has_neg) = true;
    if (has_pos && has_neg) {
        r.auc = roc_auc(y_true, scores);
    } else {
        r.auc = 0;
        r.degenerate = true;
    }
    return r;
}

MetricsReport mean_of(const std::vector<MetricsReport>& folds) {
    MetricsReport m;
    for (const auto& f : folds) {
        m.precision += f.precision;
        m.recall += f.recall;
        m.f1 += f.f1;
        m.auc += f.auc;
        m.degenerate = m.degenerate || f.degenerate;
    }
    const double n = static_cast<double>(folds.size());
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    m.auc /= n;
    return m;
}

MetricsReport std_of(const std::vector<MetricsReport>& folds, const MetricsReport& mean) {
    MetricsReport s;
    if (folds.size() < 2) return s;
    for (const auto& f : folds) {
        s.precision += (f.precision - mean.precision) * (f.precision - mean.precision);
        s.recall += (f.recall - mean.recall) * (f.recall - mean.recall);
        s.f1 += (f.f1 - mean.f1) * (f.f1 - mean.f1);
        s.auc += (f.auc - mean.auc) * (f.auc - mean.auc);
    }
    const double n = static_cast<double>(folds.size() - 1);
    s.precision = std::sqrt(s.precision / n);
    s.recall = std::sqrt(s.recall / n);
    s.f1 = std::sqrt(s.f1 / n);
    s.auc = std::sqrt(s.auc / n);
    return s;
}

}  // namespace

ExperimentResult run_cv_experiment(const LabeledDataset& data, Method method,
                                   const ClassifierSpec& spec, const CvConfig& config) {
    data.validate();
    FoldPlan plan = stratified_kfold(data, config.k, config.seed);

    ExperimentResult result;
    result.method = to_string(method);
    result.spec = spec;
    result.seed = config.seed;
    if (config.trace) {
        config.trace->fit_rows.assign(static_cast<size_t>(config.k), {});
        config.trace->test_rows.assign(static_cast<size_t>(config.k), {});
    }

    result.folds.assign(static_cast<size_t>(config.k), {});
    auto run_fold = [&](int fold) {
        std::vector<size_t> train_idx, test_idx;
        for (size_t i = 0; i < data.instance_count(); ++i)
            (plan.assignments[i] == fold ? test_idx : train_idx).push_back(i);
        if (config.trace) {
            config.trace->fit_rows[static_cast<size_t>(fold)] = train_idx;
            config.trace->test_rows[static_cast<size_t>(fold)] = test_idx;
        }

        LabeledDataset train, test;
        for (size_t i : train_idx) {
            train.features.push_back(data.features[i]);
            train.labels.push_back(data.labels[i]);
        }
        for (size_t i : test_idx) {
            test.features.push_back(data.features[i]);
            test.labels.push_back(data.labels[i]);
        }

        // normalization fitted on the training portion only
        auto [stats, norm_train] = fit_apply_minmax(train, train);
        Matrix test_features = apply_minmax(stats, test.features);

        ClassifierSpec fold_spec = spec;
        fold_spec.seed = derive_seed(config.seed, "fit", static_cast<uint64_t>(fold));
        const uint64_t method_seed =
            derive_seed(config.method_seed, "method", static_cast<uint64_t>(fold));

        std::vector<int> y_pred;
        Vector scores;

        if (method == Method::cross_concat) {
            Matrix minority, majority;
            for (size_t i = 0; i < norm_train.instance_count(); ++i)
                (norm_train.labels[i] == 1 ? minority : majority)
                    .push_back(norm_train.features[i]);
            if (minority.empty() || majority.empty())
                throw std::runtime_error("run_cv_experiment: single-class training fold");
            CCModel model = cc_fit(fold_spec, minority, majority, config.cc_cap);
            for (const auto& x : test_features) {
                CCPrediction p = cc_predict(model, x);
                y_pred.push_back(p.label);
                scores.push_back(p.p_z - p.p_w);  // monotone minority-ness score
            }
        } else {
            Matrix X = norm_train.features;
            std::vector<int> y = norm_train.labels;
            if (method != Method::none) {
                size_t n_pos = 0, n_neg = 0;
                for (int v : y) (v == 1 ? n_pos : n_neg)++;
                const int min_label = n_pos <= n_neg ? 1 : 0;
                Matrix minority;
                for (size_t i = 0; i < y.size(); ++i)
                    if (y[i] == min_label) minority.push_back(X[i]);
                const size_t n_needed = std::max(n_pos, n_neg) - std::min(n_pos, n_neg);
                Matrix synthetic;
                if (method == Method::smote) {
                    SmoteConfig sc;
                    sc.k = std::min<int>(5, static_cast<int>(minority.size()) - 1);
                    if (sc.k < 1)
                        throw std::runtime_error("run_cv_experiment: minority fold too small for smote");
                    sc.n_synthetic = n_needed;
                    sc.seed = method_seed;
                    synthetic = smote(minority, sc);
                } else {
                    synthetic = random_oversample(minority, n_needed, method_seed);
                }
                for (auto& row : synthetic) {
                    X.push_back(std::move(row));
                    y.push_back(min_label);
                }
            }
            TrainedClassifier model = fit(fold_spec, X, y);
            for (const auto& x : test_features) {
                double p = model.predict_proba(x);
                scores.push_back(p);
                y_pred.push_back(p >= 0.5 ? 1 : 0);
            }
        }

        result.folds[static_cast<size_t>(fold)] = fold_metrics(test.labels, y_pred, scores);
    };

    const int jobs = std::max(1, config.jobs);
    if (jobs == 1) {
        for (int fold = 0; fold < config.k; ++fold) run_fold(fold);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> workers;
        std::exception_ptr error;
        std::mutex error_mutex;
        for (int t = 0; t < std::min(jobs, config.k); ++t) {
            workers.emplace_back([&] {
                for (int fold = next.fetch_add(1); fold < config.k; fold = next.fetch_add(1)) {
                    try {
                        run_fold(fold);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error) error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& w : workers) w.join();
        if (error) std::rethrow_exception(error);
    }

    result.mean = mean_of(result.folds);
    result.stddev = std_of(result.folds, result.mean);
    return result;
}

ExperimentResult run_cv_experiment(const LabeledDataset& data, Method method,
                                   const ClassifierSpec& spec, int k, uint64_t seed) {
    CvConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    cfg.method_seed = seed;
    return run_cv_experiment(data, method, spec, cfg);
}

StabilityReport stability_probe(const LabeledDataset& data, Method method,
                                const ClassifierSpec& spec, int repeats, uint64_t base_seed,
                                int k, size_t cc_cap) {
    if (repeats < 2) throw std::invalid_argument("stability_probe: repeats must be >= 2");
    std::vector<MetricsReport> means;
    for (int r = 0; r < repeats; ++r) {
        CvConfig cfg;
        cfg.k = k;
        cfg.seed = base_seed;  // folds and classifier seeds fixed
        cfg.method_seed = derive_seed(base_seed, "stability", static_cast<uint64_t>(r));
        cfg.cc_cap = cc_cap;
        means.push_back(run_cv_experiment(data, method, spec, cfg).mean);
    }
    // population variance; identical repeats must report exactly 0, so guard
    // against rounding in the mean
    auto variance = [&](auto pick) {
        bool all_equal = true;
        double mean = 0;
        for (const auto& m : means) {
            all_equal = all_equal && pick(m) == pick(means[0]);
            mean += pick(m);
        }
        if (all_equal) return 0.0;
        mean /= static_cast<double>(repeats);
        double var = 0;
        for (const auto& m : means) var += (pick(m) - mean) * (pick(m) - mean);
        return var / static_cast<double>(repeats);
    };
    StabilityReport rep;
    rep.precision_var = variance([](const MetricsReport& m) { return m.precision; });
    rep.recall_var = variance([](const MetricsReport& m) { return m.recall; });
    rep.f1_var = variance([](const MetricsReport& m) { return m.f1; });
    rep.auc_var = variance([](const MetricsReport& m) { return m.auc; });
    return rep;
}

namespace {

nlohmann::json metrics_to_json(const MetricsReport& m) {
    return {{"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1},
            {"auc", m.auc},
            {"degenerate", m.degenerate}};
}

}  // namespace

std::string ExperimentResult::to_json(const std::string& tool_version,
                                      const std::string& resolved_config) const {
    nlohmann::json j;
    if (!tool_version.empty()) j["tool_version"] = tool_version;
    if (!resolved_config.empty()) j["config"] = nlohmann::json::parse(resolved_config);
    j["method"] = method;
    j["classifier"] = vbdp::to_string(spec.kind);
    j["seed"] = seed;
    j["folds"] = nlohmann::json::array();
    for (const auto& f : folds) j["folds"].push_back(metrics_to_json(f));
    j["mean"] = metrics_to_json(mean);
    j["stddev"] = metrics_to_json(stddev);
    return j.dump(2);
}

void ExperimentResult::save_folds_csv(const std::string& path, const std::string& metadata) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    if (!metadata.empty()) out << "# " << metadata << "\n";
    out << "fold,precision,recall,f1,auc,degenerate\n";
    for (size_t i = 0; i < folds.size(); ++i)
        out << i << ',' << folds[i].precision << ',' << folds[i].recall << ',' << folds[i].f1
            << ',' << folds[i].auc << ',' << (folds[i].degenerate ? 1 : 0) << "\n";
}

}  // namespace vbdp
