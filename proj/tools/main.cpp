// Command-line workbench: dataset prep, virtual big data synthesis,
// cross-concatenation projection, autoencoder / anomaly runs, and
// cross-validated experiments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vbdp/anomaly.hpp"
#include "vbdp/autoencoder.hpp"
#include "vbdp/crossconcat.hpp"
#include "vbdp/dataset.hpp"
#include "vbdp/eval.hpp"
#include "vbdp/vbd.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "vbdp 0.1.0";

std::string metadata_line(const json& resolved) {
    return std::string(kVersion) + " config=" + resolved.dump();
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }
    return j;
}

template <typename T>
T require(const json& j, const std::string& field) {
    if (!j.contains(field)) throw std::invalid_argument("config: missing field '" + field + "'");
    try {
        return j.at(field).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument("config: bad value for field '" + field + "'");
    }
}

template <typename T>
T get_or(const json& j, const std::string& field, T fallback) {
    if (!j.contains(field)) return fallback;
    try {
        return j.at(field).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument("config: bad value for field '" + field + "'");
    }
}

vbdp::LabeledDataset load_dataset(const json& spec) {
    const std::string format = get_or<std::string>(spec, "format", "csv");
    if (format == "csv") {
        vbdp::CsvOptions opts;
        opts.has_header = get_or(spec, "has_header", false);
        opts.label_column = get_or<std::string>(spec, "label_column", "-1");
        opts.positive_label = require<std::string>(spec, "positive_label");
        return vbdp::load_csv(require<std::string>(spec, "path"), opts);
    }
    if (format == "idx") {
        return vbdp::load_idx(require<std::string>(spec, "images_path"),
                              require<std::string>(spec, "labels_path"),
                              get_or<size_t>(spec, "limit", SIZE_MAX));
    }
    throw std::invalid_argument("config: unknown dataset format '" + format + "'");
}

vbdp::ClassifierSpec parse_classifier(const json& j) {
    vbdp::ClassifierSpec spec;
    spec.kind = vbdp::classifier_kind_from_string(require<std::string>(j, "kind"));
    spec.learning_rate = get_or(j, "learning_rate", spec.learning_rate);
    spec.epochs = get_or(j, "epochs", spec.epochs);
    spec.batch_size = get_or(j, "batch_size", spec.batch_size);
    spec.l2 = get_or(j, "l2", spec.l2);
    spec.hidden = get_or(j, "hidden", spec.hidden);
    spec.validate();
    return spec;
}

std::vector<int> parse_arch(const std::string& text) {
    std::vector<int> widths;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) widths.push_back(std::stoi(tok));
    return widths;
}

int cmd_synth(const std::string& input, const std::string& output, const std::string& algorithm,
              int c, size_t u, uint64_t seed) {
    vbdp::Matrix data = vbdp::load_matrix_csv(input);
    vbdp::VirtualDataset vbd;
    if (algorithm == "small") {
        vbd = vbdp::synth_small(data);
    } else {
        vbdp::ConcatConfig cfg{c, u, seed};
        vbd = vbdp::synth_large(data, cfg);
    }
    json resolved = {{"command", "synth"}, {"input", input},   {"output", output},
                     {"algorithm", algorithm}, {"c", vbd.c},   {"u", u},
                     {"seed", seed}};
    vbdp::save_csv(output, vbd.vectors, nullptr, metadata_line(resolved));
    std::cout << "wrote " << vbd.vectors.size() << " rows of dimension "
              << vbd.vectors[0].size() << " to " << output << "\n";
    return 0;
}

int cmd_project(const json& dataset_spec, const std::string& output, size_t cap) {
    vbdp::LabeledDataset data = load_dataset(dataset_spec);
    vbdp::BinarySplit split = vbdp::split_binary(data);
    vbdp::ProjectedPair pair = vbdp::cross_concatenate(split.minority, split.majority, cap);

    vbdp::Matrix rows;
    std::vector<int> labels;
    for (auto& r : pair.minority) {
        rows.push_back(std::move(r));
        labels.push_back(1);
    }
    for (auto& r : pair.majority) {
        rows.push_back(std::move(r));
        labels.push_back(0);
    }
    json resolved = {{"command", "project"}, {"dataset", dataset_spec}, {"output", output},
                     {"cap", cap}};
    vbdp::save_csv(output, rows, &labels, metadata_line(resolved));
    std::cout << "wrote " << rows.size() << " projected rows (" << pair.minority.size()
              << " per class) of dimension " << rows[0].size() << " to " << output << "\n";
    return 0;
}

int cmd_train_ae(const std::string& input, const std::string& arch_text, int epochs, double lr,
                 int batch, uint64_t seed, double val_fraction, const std::string& model_out,
                 const std::string& report_out) {
    vbdp::Matrix data = vbdp::load_matrix_csv(input);
    // min-max to [0,1] so the sigmoid output layer can reach the targets
    vbdp::NormalizationStats stats = vbdp::fit_minmax(data);
    data = vbdp::apply_minmax(stats, data);

    vbdp::AEArchitecture arch{parse_arch(arch_text)};
    vbdp::AETrainConfig cfg;
    cfg.epochs = epochs;
    cfg.learning_rate = lr;
    cfg.batch_size = batch;
    cfg.seed = seed;
    cfg.validation_fraction = val_fraction;
    auto [model, report] = vbdp::train_ae(data, arch, cfg);

    json resolved = {{"command", "train-ae"}, {"input", input},     {"arch", arch.layer_sizes},
                     {"epochs", epochs},      {"learning_rate", lr}, {"batch_size", batch},
                     {"seed", seed},          {"validation_fraction", val_fraction}};
    if (!model_out.empty()) {
        std::ofstream out(model_out);
        if (!out) throw std::runtime_error("cannot write file: " + model_out);
        out << model.to_json() << "\n";
    }
    if (!report_out.empty()) vbdp::save_report_csv(report_out, report, metadata_line(resolved));
    std::cout << "final train loss " << report.train_loss.back() << ", val loss "
              << report.val_loss.back() << "\n";
    return 0;
}

int cmd_experiment(const std::string& config_path, std::optional<uint64_t> seed_override,
                   const std::string& output_override, int jobs) {
    json cfg = load_config(config_path);
    vbdp::LabeledDataset data = load_dataset(require<json>(cfg, "dataset"));
    vbdp::Method method = vbdp::method_from_string(require<std::string>(cfg, "method"));
    vbdp::ClassifierSpec spec = parse_classifier(require<json>(cfg, "classifier"));

    vbdp::CvConfig cv;
    cv.k = get_or(cfg, "k", 10);
    cv.seed = seed_override.value_or(get_or<uint64_t>(cfg, "seed", 0));
    cv.method_seed = cv.seed;
    cv.cc_cap = get_or<size_t>(cfg, "cc_cap", 0);
    cv.jobs = jobs;
    vbdp::ExperimentResult result = vbdp::run_cv_experiment(data, method, spec, cv);

    json resolved = cfg;
    resolved["seed"] = cv.seed;
    resolved["k"] = cv.k;
    resolved["jobs"] = jobs;

    const std::string out_dir =
        !output_override.empty() ? output_override : get_or<std::string>(cfg, "output_dir", ".");
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "result.json");
        if (!out) throw std::runtime_error("cannot write result.json");
        out << result.to_json(kVersion, resolved.dump()) << "\n";
    }
    result.save_folds_csv((fs::path(out_dir) / "folds.csv").string(), metadata_line(resolved));

    std::printf("%-18s %10s %10s %10s %10s\n", "method", "precision", "recall", "f1", "auc");
    std::printf("%-18s %10.4f %10.4f %10.4f %10.4f  (mean)\n", result.method.c_str(),
                result.mean.precision, result.mean.recall, result.mean.f1, result.mean.auc);
    std::printf("%-18s %10.4f %10.4f %10.4f %10.4f  (std)\n", "", result.stddev.precision,
                result.stddev.recall, result.stddev.f1, result.stddev.auc);
    return 0;
}

int cmd_anomaly(const std::string& config_path, std::optional<uint64_t> seed_override,
                const std::string& output_override) {
    json cfg = load_config(config_path);
    vbdp::AnomalyConfig acfg;
    acfg.u = require<int>(cfg, "u");
    acfg.w = require<int>(cfg, "w");
    acfg.seed = seed_override.value_or(get_or<uint64_t>(cfg, "seed", 0));
    acfg.validate();

    vbdp::Matrix train = vbdp::load_matrix_csv(require<std::string>(require<json>(cfg, "train"), "path"));
    vbdp::LabeledDataset test = load_dataset(require<json>(cfg, "test"));
    if (test.feature_count() != train[0].size())
        throw std::invalid_argument("config: train/test dimension mismatch");

    vbdp::NormalizationStats stats = vbdp::fit_minmax(train);
    train = vbdp::apply_minmax(stats, train);
    vbdp::Matrix test_features = vbdp::apply_minmax(stats, test.features);

    vbdp::AEArchitecture arch{require<std::vector<int>>(cfg, "arch")};
    vbdp::AETrainConfig tcfg;
    tcfg.epochs = get_or(cfg, "epochs", 3);
    tcfg.learning_rate = get_or(cfg, "learning_rate", 0.05);
    tcfg.batch_size = get_or(cfg, "batch_size", 32);
    tcfg.seed = acfg.seed;
    auto [model, report] = vbdp::train_ae(vbdp::synth_small(train).vectors, arch, tcfg);

    std::vector<vbdp::AnomalyVerdict> verdicts;
    for (size_t i = 0; i < test_features.size(); ++i) {
        vbdp::AnomalyConfig per = acfg;
        per.seed = vbdp::derive_seed(acfg.seed, "detect", i);
        verdicts.push_back(vbdp::detect(model, train, test_features[i], per));
    }

    // normal (label 1) is the positive class: predicted positive = not flagged
    std::vector<int> y_pred;
    for (const auto& v : verdicts) y_pred.push_back(v.is_anomaly ? 0 : 1);
    vbdp::Prf prf = vbdp::precision_recall_f1(vbdp::confusion(test.labels, y_pred));

    json resolved = cfg;
    resolved["seed"] = acfg.seed;
    const std::string out_dir =
        !output_override.empty() ? output_override : get_or<std::string>(cfg, "output_dir", ".");
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "verdicts.csv");
        if (!out) throw std::runtime_error("cannot write verdicts.csv");
        out << "# " << metadata_line(resolved) << "\n";
        out << "id,c,is_anomaly\n";
        for (size_t i = 0; i < verdicts.size(); ++i)
            out << i << ',' << verdicts[i].count << ',' << (verdicts[i].is_anomaly ? 1 : 0) << "\n";
    }
    {
        json mj = {{"tool_version", kVersion}, {"config", resolved},
                   {"u", acfg.u},              {"w", acfg.w},
                   {"precision", prf.precision}, {"recall", prf.recall},
                   {"f1", prf.f1},             {"degenerate", prf.degenerate}};
        std::ofstream out(fs::path(out_dir) / "metrics.json");
        if (!out) throw std::runtime_error("cannot write metrics.json");
        out << mj.dump(2) << "\n";
    }
    std::cout << "u=" << acfg.u << " w=" << acfg.w << " precision=" << prf.precision
              << " recall=" << prf.recall << " f1=" << prf.f1 << "\n";
    return 0;
}

int cmd_stability(const std::string& config_path, std::optional<uint64_t> seed_override) {
    json cfg = load_config(config_path);
    vbdp::LabeledDataset data = load_dataset(require<json>(cfg, "dataset"));
    vbdp::Method method = vbdp::method_from_string(require<std::string>(cfg, "method"));
    vbdp::ClassifierSpec spec = parse_classifier(require<json>(cfg, "classifier"));
    const int repeats = get_or(cfg, "repeats", 10);
    const int k = get_or(cfg, "k", 10);
    const uint64_t seed = seed_override.value_or(get_or<uint64_t>(cfg, "seed", 0));

    vbdp::StabilityReport rep = vbdp::stability_probe(data, method, spec, repeats, seed, k,
                                                      get_or<size_t>(cfg, "cc_cap", 0));
    std::cout << "variance over " << repeats << " repeats (" << vbdp::to_string(method) << "):\n"
              << "  precision " << rep.precision_var << "\n"
              << "  recall    " << rep.recall_var << "\n"
              << "  f1        " << rep.f1_var << "\n"
              << "  auc       " << rep.auc_var << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Virtual big data synthesis, cross-concatenation, and anomaly detection workbench"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Synthesize virtual big data from a feature CSV");
    std::string s_input, s_output, s_algorithm = "small";
    int s_c = 2;
    size_t s_u = 1;
    uint64_t s_seed = 0;
    synth->add_option("--input", s_input)->required();
    synth->add_option("--output", s_output)->required();
    synth->add_option("--algorithm", s_algorithm)->check(CLI::IsMember({"small", "large"}));
    synth->add_option("-c,--concat-factor", s_c);
    synth->add_option("-u,--size", s_u);
    synth->add_option("--seed", s_seed);

    // project
    auto* project = app.add_subcommand("project", "Cross-concatenate a labeled dataset");
    std::string p_input, p_output, p_label = "-1", p_positive;
    bool p_header = false;
    size_t p_cap = 0;
    project->add_option("--input", p_input)->required();
    project->add_option("--output", p_output)->required();
    project->add_option("--label-column", p_label);
    project->add_option("--positive-label", p_positive)->required();
    project->add_flag("--has-header", p_header);
    project->add_option("--cap", p_cap);

    // train-ae
    auto* train = app.add_subcommand("train-ae", "Train a dense autoencoder on a feature CSV");
    std::string t_input, t_arch, t_model, t_report;
    int t_epochs = 100, t_batch = 32;
    double t_lr = 0.05, t_val = 0.2;
    uint64_t t_seed = 0;
    train->add_option("--input", t_input)->required();
    train->add_option("--arch", t_arch)->required();
    train->add_option("--epochs", t_epochs);
    train->add_option("--lr", t_lr);
    train->add_option("--batch", t_batch);
    train->add_option("--seed", t_seed);
    train->add_option("--val-fraction", t_val);
    train->add_option("--output-model", t_model);
    train->add_option("--output-report", t_report);

    // config-driven commands
    auto* experiment = app.add_subcommand("experiment", "Cross-validated classification experiment");
    auto* anomaly = app.add_subcommand("anomaly", "Virtual-big-data anomaly detection run");
    auto* stability = app.add_subcommand("stability", "Metric variance across method seeds");
    std::string e_config, e_output;
    std::string a_config, a_output;
    std::string st_config;
    uint64_t o_seed = 0;
    bool o_seed_set = false;
    int e_jobs = 1;
    experiment->add_option("--config", e_config)->required();
    experiment->add_option("--output", e_output);
    experiment->add_option("--jobs", e_jobs)->check(CLI::PositiveNumber);
    anomaly->add_option("--config", a_config)->required();
    anomaly->add_option("--output", a_output);
    stability->add_option("--config", st_config)->required();
    for (auto* sub : {experiment, anomaly, stability})
        sub->add_option("--seed", o_seed)->each([&](const std::string&) { o_seed_set = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::optional<uint64_t> seed_override;
    if (o_seed_set) seed_override = o_seed;

    try {
        if (synth->parsed()) return cmd_synth(s_input, s_output, s_algorithm, s_c, s_u, s_seed);
        if (project->parsed()) {
            json spec = {{"path", p_input},
                         {"label_column", p_label},
                         {"positive_label", p_positive},
                         {"has_header", p_header}};
            return cmd_project(spec, p_output, p_cap);
        }
        if (train->parsed())
            return cmd_train_ae(t_input, t_arch, t_epochs, t_lr, t_batch, t_seed, t_val, t_model,
                                t_report);
        if (experiment->parsed()) return cmd_experiment(e_config, seed_override, e_output, e_jobs);
        if (anomaly->parsed()) return cmd_anomaly(a_config, seed_override, a_output);
        if (stability->parsed()) return cmd_stability(st_config, seed_override);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
