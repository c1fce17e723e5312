#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return VBDP_CLI_PATH; }

int run(const std::string& args) {
    std::string cmd = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("vbdp_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 30-row, 2-feature matrix CSV (no labels)
std::string matrix_csv(size_t rows) {
    std::string s;
    for (size_t i = 0; i < rows; ++i) {
        double a = 0.1 + 0.8 * static_cast<double>(i) / static_cast<double>(rows);
        s += std::to_string(a) + "," + std::to_string(1.0 - a) + "\n";
    }
    return s;
}

// imbalanced labeled CSV: n_min positives near 0.3, n_maj negatives near 0.7
std::string labeled_csv(size_t n_min, size_t n_maj) {
    std::string s;
    for (size_t i = 0; i < n_min; ++i) {
        double a = 0.25 + 0.01 * static_cast<double>(i);
        s += std::to_string(a) + "," + std::to_string(a + 0.02) + ",1\n";
    }
    for (size_t i = 0; i < n_maj; ++i) {
        double a = 0.65 + 0.005 * static_cast<double>(i);
        s += std::to_string(a) + "," + std::to_string(a - 0.02) + ",0\n";
    }
    return s;
}

size_t count_data_rows(const std::string& csv_text) {
    std::stringstream ss(csv_text);
    std::string line;
    size_t n = 0;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#') ++n;
    return n;
}

}  // namespace

TEST_CASE("version flag exits 0") { CHECK(run("--version") == 0); }

TEST_CASE("no subcommand is a usage error") { CHECK(run("") == 2); }

TEST_CASE("synth small") {
    TempDir dir;
    write_file(dir.file("in.csv"), matrix_csv(30));

    SUBCASE("n=30 emits 900 rows with a metadata header") {
        CHECK(run("synth --input " + dir.file("in.csv") + " --output " + dir.file("out.csv")) == 0);
        auto text = read_file(dir.file("out.csv"));
        CHECK(text.rfind("# vbdp ", 0) == 0);  // version + resolved config header
        CHECK(count_data_rows(text) == 900);
    }
    SUBCASE("reruns are byte-identical") {
        // same output path both times: the metadata header echoes the resolved
        // config, which includes the output location
        CHECK(run("synth --input " + dir.file("in.csv") + " --output " + dir.file("a.csv")) == 0);
        auto first = read_file(dir.file("a.csv"));
        CHECK(run("synth --input " + dir.file("in.csv") + " --output " + dir.file("a.csv")) == 0);
        CHECK(first == read_file(dir.file("a.csv")));
    }
    SUBCASE("large with u=100 emits 100 rows") {
        CHECK(run("synth --algorithm large -u 100 --seed 7 --input " + dir.file("in.csv") +
                  " --output " + dir.file("l.csv")) == 0);
        CHECK(count_data_rows(read_file(dir.file("l.csv"))) == 100);
    }
    SUBCASE("seeded large runs are byte-identical") {
        CHECK(run("synth --algorithm large -u 50 --seed 3 --input " + dir.file("in.csv") +
                  " --output " + dir.file("s1.csv")) == 0);
        auto first = read_file(dir.file("s1.csv"));
        CHECK(run("synth --algorithm large -u 50 --seed 3 --input " + dir.file("in.csv") +
                  " --output " + dir.file("s1.csv")) == 0);
        CHECK(first == read_file(dir.file("s1.csv")));
    }
    SUBCASE("missing input file is a runtime error (exit 1)") {
        CHECK(run("synth --input " + dir.file("nope.csv") + " --output " + dir.file("o.csv")) == 1);
    }
    SUBCASE("bad algorithm name is a validation error (exit 2)") {
        CHECK(run("synth --algorithm tiny --input " + dir.file("in.csv") + " --output " +
                  dir.file("o.csv")) == 2);
    }
}

TEST_CASE("project") {
    TempDir dir;
    write_file(dir.file("in.csv"), labeled_csv(3, 5));
    CHECK(run("project --input " + dir.file("in.csv") + " --positive-label 1 --output " +
              dir.file("proj.csv")) == 0);
    auto text = read_file(dir.file("proj.csv"));
    CHECK(count_data_rows(text) == 30);  // 2 * M * N = 2 * 3 * 5
}

TEST_CASE("train-ae") {
    TempDir dir;
    write_file(dir.file("in.csv"), matrix_csv(20));
    CHECK(run("train-ae --input " + dir.file("in.csv") + " --arch 2,1,2 --epochs 5 --lr 0.1"
              " --seed 4 --output-model " + dir.file("model.json") + " --output-report " +
              dir.file("report.csv")) == 0);
    auto report = read_file(dir.file("report.csv"));
    CHECK(report.find("epoch,train_loss,val_loss") != std::string::npos);
    CHECK(count_data_rows(report) == 6);  // header + 5 epochs
    CHECK(read_file(dir.file("model.json")).find("\"autoencoder\"") != std::string::npos);

    SUBCASE("invalid architecture is a validation error") {
        CHECK(run("train-ae --input " + dir.file("in.csv") + " --arch 2,3,2 --epochs 1") == 2);
    }
}

TEST_CASE("experiment") {
    TempDir dir;
    write_file(dir.file("data.csv"), labeled_csv(12, 36));
    auto config = [&](const std::string& method) {
        return std::string("{\n")
            + "  \"dataset\": {\"path\": \"" + dir.file("data.csv") + "\", \"positive_label\": \"1\"},\n"
            + "  \"method\": \"" + method + "\",\n"
            + "  \"classifier\": {\"kind\": \"logistic\", \"epochs\": 30},\n"
            + "  \"k\": 4, \"seed\": 11\n"
            + "}\n";
    };

    SUBCASE("writes result.json with one report per fold") {
        write_file(dir.file("cfg.json"), config("cross_concat"));
        CHECK(run("experiment --config " + dir.file("cfg.json") + " --output " +
                  dir.file("out")) == 0);
        auto result = read_file(dir.file("out") + "/result.json");
        CHECK(result.find("\"folds\"") != std::string::npos);
        CHECK(result.find("\"tool_version\"") != std::string::npos);
        auto folds = read_file(dir.file("out") + "/folds.csv");
        CHECK(count_data_rows(folds) == 5);  // header + 4 folds
    }
    SUBCASE("repeated runs are byte-identical") {
        write_file(dir.file("cfg.json"), config("smote"));
        CHECK(run("experiment --config " + dir.file("cfg.json") + " --output " + dir.file("r1")) == 0);
        CHECK(run("experiment --config " + dir.file("cfg.json") + " --output " + dir.file("r2")) == 0);
        CHECK(read_file(dir.file("r1") + "/result.json") == read_file(dir.file("r2") + "/result.json"));
        CHECK(read_file(dir.file("r1") + "/folds.csv") == read_file(dir.file("r2") + "/folds.csv"));
    }
    SUBCASE("unknown method is a validation error naming the value") {
        write_file(dir.file("cfg.json"), config("upsample"));
        CHECK(run("experiment --config " + dir.file("cfg.json")) == 2);
    }
    SUBCASE("missing config file is a runtime error") {
        CHECK(run("experiment --config " + dir.file("nope.json")) == 1);
    }
}

TEST_CASE("anomaly") {
    TempDir dir;
    write_file(dir.file("train.csv"), matrix_csv(25));
    // labeled test set: label 1 = normal
    write_file(dir.file("test.csv"), labeled_csv(4, 3));
    auto config = [&](int u, int w) {
        return std::string("{\n")
            + "  \"train\": {\"path\": \"" + dir.file("train.csv") + "\"},\n"
            + "  \"test\": {\"path\": \"" + dir.file("test.csv") + "\", \"positive_label\": \"1\"},\n"
            + "  \"arch\": [4, 3, 2, 3, 4],\n"
            + "  \"u\": " + std::to_string(u) + ", \"w\": " + std::to_string(w) + ",\n"
            + "  \"epochs\": 2, \"seed\": 5\n"
            + "}\n";
    };

    SUBCASE("writes verdicts and metrics echoing u and w") {
        write_file(dir.file("cfg.json"), config(20, 12));
        CHECK(run("anomaly --config " + dir.file("cfg.json") + " --output " + dir.file("out")) == 0);
        auto verdicts = read_file(dir.file("out") + "/verdicts.csv");
        CHECK(verdicts.find("id,c,is_anomaly") != std::string::npos);
        CHECK(count_data_rows(verdicts) == 8);  // header + 7 test points
        auto metrics = read_file(dir.file("out") + "/metrics.json");
        CHECK(metrics.find("\"u\": 20") != std::string::npos);
        CHECK(metrics.find("\"w\": 12") != std::string::npos);
    }
    SUBCASE("w > u is a validation error") {
        write_file(dir.file("cfg.json"), config(10, 11));
        CHECK(run("anomaly --config " + dir.file("cfg.json")) == 2);
    }
    SUBCASE("empty test file is a validation error") {
        write_file(dir.file("empty.csv"), "");
        write_file(dir.file("cfg.json"),
                   std::string("{\"train\": {\"path\": \"") + dir.file("train.csv") +
                       "\"}, \"test\": {\"path\": \"" + dir.file("empty.csv") +
                       "\", \"positive_label\": \"1\"}, \"arch\": [4,3,2,3,4], \"u\": 20, \"w\": 12}");
        CHECK(run("anomaly --config " + dir.file("cfg.json")) == 2);
    }
}

TEST_CASE("stability") {
    TempDir dir;
    write_file(dir.file("data.csv"), labeled_csv(10, 30));
    write_file(dir.file("cfg.json"),
               std::string("{\"dataset\": {\"path\": \"") + dir.file("data.csv") +
                   "\", \"positive_label\": \"1\"}, \"method\": \"cross_concat\","
                   " \"classifier\": {\"kind\": \"logistic\", \"epochs\": 20},"
                   " \"repeats\": 2, \"k\": 4, \"seed\": 3}");
    CHECK(run("stability --config " + dir.file("cfg.json")) == 0);
}
