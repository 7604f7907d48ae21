#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ccsemi/cli.hpp"
#include "ccsemi/error.hpp"
#include "ccsemi/io.hpp"
#include "ccsemi/kernels.hpp"

namespace {

void emit(const nlohmann::ordered_json& report, const std::string& out) {
    const std::string text = report.dump(2) + "\n";
    if (out.empty())
        std::cout << text;
    else
        ccsemi::write_text_file(out, text);
}

void add_solver_flags(CLI::App* cmd, ccsemi::SolverOptions& solver) {
    cmd->add_option("--epsilon", solver.epsilon, "Outer stopping tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-iter", solver.max_iterations, "Outer iteration limit")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--renormalize-p,!--no-renormalize-p", solver.renormalize_p,
                  "Rescale each jump-weight update to sum to one")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-supervised logistic regression for case-control samples"};
    app.require_subcommand(1);

    std::string kernels = "auto";
    app.add_option("--kernels", kernels, "Vector kernels: auto, scalar or avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
        ->capture_default_str();
    std::string out;

    ccsemi::FitCommandOptions fit_opts;
    std::string labeled, unlabeled;
    auto* fit = app.add_subcommand("fit", "Fit the model to labeled and unlabeled CSV files");
    fit->add_option("labeled", labeled, "CSV with header y,x1,...,xp")->required()->check(CLI::ExistingFile);
    fit->add_option("unlabeled", unlabeled, "CSV with header x1,...,xp")->check(CLI::ExistingFile);
    add_solver_flags(fit, fit_opts.solver);
    fit->add_option("--level", fit_opts.level, "Confidence level of the Wald intervals")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    fit->add_option("--out", out, "Write the JSON report here instead of stdout");

    ccsemi::SimulateCommandOptions sim_opts;
    std::string scenario;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    bool sequential = false;
    std::vector<std::string> estimators;
    auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo study from a scenario file");
    sim->add_option("scenario", scenario, "Scenario file (key = value lines)")->required()->check(CLI::ExistingFile);
    auto* reps_opt = sim->add_option("--replications", replications, "Override the replication count")
                         ->check(CLI::PositiveNumber);
    auto* seed_opt = sim->add_option("--seed", seed, "Override the scenario seed");
    sim->add_option("--threads", sim_opts.study.threads, "Worker threads (0 = all cores)");
    sim->add_flag("--sequential", sequential, "Run replications on one thread");
    sim->add_option("--estimators", estimators, "Comma-separated: proposed, single_cc")->delimiter(',');
    sim->add_option("--level", sim_opts.study.level, "Confidence level for coverage")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    add_solver_flags(sim, sim_opts.study.solver);
    sim->add_option("--out", out, "Write the JSON report here instead of stdout");

    ccsemi::PredictCommandOptions pred_opts;
    std::string model, test, train, roc;
    auto* pred = app.add_subcommand("predict", "Evaluate a fitted model on labeled test data");
    pred->add_option("model", model, "JSON report written by `fit`")->required()->check(CLI::ExistingFile);
    pred->add_option("test", test, "Labeled CSV to score")->required()->check(CLI::ExistingFile);
    pred->add_option("--train", train, "Labeled CSV used to choose the cutoff")->check(CLI::ExistingFile);
    pred->add_option("--roc", roc, "Write ROC points of the test set to this CSV");
    pred->add_option("--out", out, "Write the JSON report here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (kernels == "scalar") {
            ccsemi::kernels::set_active(ccsemi::kernels::scalar_kernels());
        } else if (kernels == "avx2") {
            const auto* k = ccsemi::kernels::avx2_kernels();
            if (!k) throw ccsemi::ArgumentError("AVX2 kernels are not available on this machine");
            ccsemi::kernels::set_active(*k);
        }

        if (fit->parsed()) {
            std::optional<std::filesystem::path> unl;
            if (!unlabeled.empty()) unl = unlabeled;
            emit(ccsemi::cmd_fit(labeled, unl, fit_opts), out);
        } else if (sim->parsed()) {
            if (reps_opt->count()) sim_opts.replications = replications;
            if (seed_opt->count()) sim_opts.seed = seed;
            if (sequential) sim_opts.study.threads = 1;
            if (!estimators.empty()) {
                sim_opts.study.estimators.clear();
                for (const auto& e : estimators) sim_opts.study.estimators.push_back(ccsemi::parse_estimator(e));
            }
            const auto report = ccsemi::cmd_simulate(scenario, sim_opts);
            emit(report, out);
            if (report["failed"].get<bool>()) {
                std::cerr << "error: too many failed replications\n";
                return 2;
            }
        } else if (pred->parsed()) {
            if (!train.empty()) pred_opts.train_csv = train;
            if (!roc.empty()) pred_opts.roc_csv = roc;
            emit(ccsemi::cmd_predict(model, test, pred_opts), out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
