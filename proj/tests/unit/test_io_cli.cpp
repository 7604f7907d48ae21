#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <catch_amalgamated.hpp>

#include "ccsemi/cli.hpp"
#include "ccsemi/error.hpp"
#include "ccsemi/io.hpp"
#include "ccsemi/solver.hpp"
#include "support/oracles.hpp"

using namespace ccsemi;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("ccsemi_test_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path operator/(const std::string& name) const { return path / name; }
};

std::size_t labeled_error_line(std::string_view text) {
    try {
        parse_labeled_csv(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CCSEMI_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("doubles survive formatting") {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(g) * std::pow(10.0, static_cast<double>(i % 40 - 20));
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(parse_double("+2.5") == 2.5);
    CHECK_FALSE(parse_double("2.5x"));
    CHECK_FALSE(parse_double(""));
    const auto nan = parse_double("nan");
    CHECK_FALSE((nan && std::isfinite(*nan)));
}

TEST_CASE("CSV round trip") {
    const auto inst = oracle::random_instance(4, 3, 7, 9, 30);
    const auto lab = inst.data.labeled();
    const auto parsed = parse_labeled_csv(labeled_csv(lab));
    REQUIRE(parsed.rows.size() == lab.size());
    CHECK(parsed.covariate_names == std::vector<std::string>{"x1", "x2", "x3"});
    for (std::size_t i = 0; i < lab.size(); ++i) {
        CHECK(parsed.rows[i].y == lab[i].y);
        CHECK(parsed.rows[i].x == lab[i].x);
    }
    const auto unl = inst.data.unlabeled();
    const auto pu = parse_unlabeled_csv(unlabeled_csv(unl, 3));
    CHECK(pu.rows == unl);
    CHECK(parse_unlabeled_csv("").rows.empty());
    CHECK(parse_unlabeled_csv("x1\n").rows.empty());
}

TEST_CASE("CSV errors carry the line number") {
    CHECK(labeled_error_line("y,x1\n1,0.5\n2,0.3\n") == 3);
    CHECK(labeled_error_line("y,x1\n1,0.5\n0,abc\n") == 3);
    CHECK(labeled_error_line("y,x1\n1,0.5,7\n") == 2);
    CHECK(labeled_error_line("x1,y\n1,0\n") == 1);
    CHECK(labeled_error_line("") == 1);
    CHECK(labeled_error_line("y,x1\n1,0.5\n0,0.1\n") == 0);
    CHECK_THROWS_AS(parse_unlabeled_csv("x1,x2\n1\n"), ParseError);
}

TEST_CASE("fit command matches the library") {
    TempDir dir;
    const auto inst = oracle::random_instance(8, 2, 30, 40, 200);
    write_text_file(dir / "lab.csv", labeled_csv(inst.data.labeled()));
    write_text_file(dir / "unl.csv", unlabeled_csv(inst.data.unlabeled(), 2));
    const auto report = cmd_fit(dir / "lab.csv", dir / "unl.csv");
    const FitResult fit = fit_mle(inst.data);
    CHECK(report["theta_hat"]["alpha"].get<double>() == fit.theta_hat.alpha);
    CHECK(report["theta_hat"]["beta"].get<std::vector<double>>() == fit.theta_hat.beta);
    CHECK(report["loglik"].get<double>() == fit.loglik);
    CHECK(report["N"].get<std::size_t>() == 200);
    CHECK(report["confidence_intervals"].size() == 3);
    CHECK(theta_from_report(report).beta == fit.theta_hat.beta);

    write_text_file(dir / "bad.csv", "x1,x2,x3\n1,2,3\n");
    CHECK_THROWS_AS(cmd_fit(dir / "lab.csv", dir / "bad.csv"), SchemaError);
    write_text_file(dir / "empty.csv", "");
    const auto lonely = cmd_fit(dir / "lab.csv", dir / "empty.csv");
    CHECK_FALSE(lonely["warnings"].empty());
}

TEST_CASE("predict command") {
    TempDir dir;
    const auto inst = oracle::random_instance(9, 2, 40, 40, 200);
    write_text_file(dir / "lab.csv", labeled_csv(inst.data.labeled()));
    write_text_file(dir / "unl.csv", unlabeled_csv(inst.data.unlabeled(), 2));
    const auto model = cmd_fit(dir / "lab.csv", dir / "unl.csv");
    write_text_file(dir / "model.json", model.dump(2));
    write_text_file(dir / "test.csv", labeled_csv(inst.data.labeled()));
    PredictCommandOptions opts;
    opts.train_csv = dir / "lab.csv";
    opts.roc_csv = dir / "roc.csv";
    const auto rep = cmd_predict(dir / "model.json", dir / "test.csv", opts);
    CHECK(rep["auc"].get<double>() > 0.5);
    CHECK(rep["cutoff_source"] == "train");
    CHECK(rep["p_estimate"].get<double>() == model["case_proportion"].get<double>());
    const std::string roc = read_text_file(dir / "roc.csv");
    CHECK(roc.rfind("threshold,fpr,tpr\ninf,0,0\n", 0) == 0);

    write_text_file(dir / "garbage.json", "{not json");
    CHECK_THROWS_AS(cmd_predict(dir / "garbage.json", dir / "test.csv"), ParseError);
    write_text_file(dir / "nomodel.json", "{}");
    CHECK_THROWS_AS(cmd_predict(dir / "nomodel.json", dir / "test.csv"), SchemaError);
}

TEST_CASE("simulate command is reproducible") {
    TempDir dir;
    write_text_file(dir / "s.scenario", "name = tiny\nalpha = -2\nbeta = 1, -1\nn0 = 30\nn1 = 20\nratio = 2\n"
                                        "replications = 4\nseed = 5\n");
    SimulateCommandOptions one;
    one.study.threads = 1;
    SimulateCommandOptions two;
    two.study.threads = 2;
    const std::string a = cmd_simulate(dir / "s.scenario", one).dump();
    CHECK(a == cmd_simulate(dir / "s.scenario", two).dump());
    one.seed = 6;
    CHECK(a != cmd_simulate(dir / "s.scenario", one).dump());
    one.replications = 2;
    CHECK(cmd_simulate(dir / "s.scenario", one)["scenario"]["replications"] == 2);
}

TEST_CASE("command-line tool exit codes") {
    TempDir dir;
    const auto inst = oracle::random_instance(12, 1, 20, 20, 80);
    write_text_file(dir / "lab.csv", labeled_csv(inst.data.labeled()));
    write_text_file(dir / "unl.csv", unlabeled_csv(inst.data.unlabeled(), 1));
    write_text_file(dir / "broken.csv", "y,x1\n1,0.2\n3,0.1\n");
    const std::string lab = (dir / "lab.csv").string(), unl = (dir / "unl.csv").string();
    CHECK(run_cli("fit " + lab + " " + unl + " --out " + (dir / "fit.json").string()) == 0);
    CHECK(fs::exists(dir / "fit.json"));
    CHECK(run_cli("--kernels scalar fit " + lab + " " + unl) == 0);
    CHECK(run_cli("fit " + (dir / "broken.csv").string()) == 1);
    CHECK(run_cli("predict " + (dir / "fit.json").string() + " " + lab) == 0);
    CHECK(run_cli("fit") != 0);
}
