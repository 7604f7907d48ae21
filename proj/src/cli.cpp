#include "ccsemi/cli.hpp"

#include <string>

#include "ccsemi/error.hpp"
#include "ccsemi/inference.hpp"
#include "ccsemi/io.hpp"
#include "ccsemi/model.hpp"
#include "ccsemi/prediction.hpp"

namespace ccsemi {
namespace {

using json = nlohmann::ordered_json;

std::vector<std::string> parameter_names(std::size_t dim) {
    std::vector<std::string> names{"alpha"};
    for (std::size_t k = 0; k < dim; ++k) names.push_back("beta" + std::to_string(k + 1));
    return names;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json fit_report(const FitResult& fit, const SemiSupervisedDataset& data, double level) {
    json out;
    out["theta_hat"] = {{"alpha", fit.theta_hat.alpha}, {"beta", fit.theta_hat.beta}};
    const auto se = fit.standard_errors();
    if (se) {
        out["standard_errors"] = std::vector<double>(se->data(), se->data() + se->size());
        const auto ci = wald_ci(fit, level);
        const auto names = parameter_names(fit.theta_hat.dim());
        json intervals = json::array();
        for (std::size_t j = 0; j < ci.size(); ++j)
            intervals.push_back({{"parameter", names[j]}, {"lower", ci[j].first}, {"upper", ci[j].second}});
        out["confidence_intervals"] = std::move(intervals);
    } else {
        out["standard_errors"] = nullptr;
        out["confidence_intervals"] = nullptr;
    }
    out["level"] = level;
    out["case_proportion"] = fit.case_proportion;
    out["loglik"] = fit.loglik;
    out["iterations"] = fit.iterations;
    out["converged"] = fit.converged;
    out["n1"] = data.n1();
    out["n0"] = data.n0();
    out["N"] = data.total_count();
    out["warnings"] = fit.warnings;
    return out;
}

json cmd_fit(const std::filesystem::path& labeled_csv,
             const std::optional<std::filesystem::path>& unlabeled_csv, const FitCommandOptions& opts) {
    if (!(opts.level > 0.0 && opts.level < 1.0)) throw ArgumentError("level must lie in (0, 1)");
    LabeledTable lab = read_labeled_csv(labeled_csv);
    UnlabeledTable unl;
    if (unlabeled_csv) unl = read_unlabeled_csv(*unlabeled_csv);
    if (!unl.covariate_names.empty() && unl.covariate_names.size() != lab.covariate_names.size())
        throw SchemaError("labeled file has " + std::to_string(lab.covariate_names.size()) +
                          " covariates but unlabeled file has " +
                          std::to_string(unl.covariate_names.size()));
    const SemiSupervisedDataset data(std::move(lab.rows), std::move(unl.rows));
    const FitResult fit = fit_mle(data, opts.solver);
    return fit_report(fit, data, opts.level);
}

json simulation_report(const StudyResult& result) {
    const SimulationScenario& s = result.scenario;
    json scen;
    scen["name"] = s.name;
    scen["alpha"] = s.alpha;
    scen["beta"] = s.beta;
    scen["n0"] = s.n0;
    scen["n1"] = s.n1;
    scen["N"] = s.labeled_count() + s.unlabeled_count();
    scen["replications"] = s.replications;
    scen["seed"] = s.seed;

    json out;
    out["scenario"] = std::move(scen);
    out["p_true"] = result.p_true;
    const auto names = parameter_names(s.covariate_dim());
    json estimators = json::object();
    for (const auto& sum : result.summaries) {
        json e;
        json params = json::array();
        for (std::size_t j = 0; j < sum.parameters.size(); ++j) {
            const auto& p = sum.parameters[j];
            json pj;
            pj["parameter"] = names[j];
            pj["bias"] = p.bias;
            if (p.se) pj["se"] = *p.se;
            pj["ese"] = p.ese;
            pj["cp"] = p.cp;
            if (p.bias_mcse) pj["bias_mcse"] = *p.bias_mcse;
            params.push_back(std::move(pj));
        }
        e["parameters"] = std::move(params);
        e["p_bias"] = sum.p_bias;
        e["p_abs_bias"] = sum.p_abs_bias;
        e["replications_used"] = sum.replications_used;
        e["replication_failures"] = sum.replication_failures;
        estimators[sum.estimator] = std::move(e);
    }
    out["estimators"] = std::move(estimators);
    out["failed"] = result.failed;
    return out;
}

json cmd_simulate(const std::filesystem::path& scenario_file, const SimulateCommandOptions& opts) {
    SimulationScenario s = load_scenario(scenario_file);
    if (opts.replications) s.replications = *opts.replications;
    if (opts.seed) s.seed = *opts.seed;
    return simulation_report(run_study(s, opts.study));
}

Theta theta_from_report(const json& report) {
    try {
        const auto& t = report.at("theta_hat");
        return Theta(t.at("alpha").get<double>(), t.at("beta").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("model report lacks theta_hat: ") + e.what());
    }
}

json cmd_predict(const std::filesystem::path& model_json, const std::filesystem::path& test_csv,
                 const PredictCommandOptions& opts) {
    json model;
    try {
        model = json::parse(read_text_file(model_json));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("model file is not JSON: ") + e.what(), 1);
    }
    const Theta theta = theta_from_report(model);
    std::optional<double> p_estimate;
    if (model.contains("case_proportion") && model["case_proportion"].is_number())
        p_estimate = model["case_proportion"].get<double>();

    const LabeledTable test = read_labeled_csv(test_csv);
    if (test.covariate_names.size() != theta.dim())
        throw SchemaError("test file has " + std::to_string(test.covariate_names.size()) +
                          " covariates, model has " + std::to_string(theta.dim()));
    std::optional<LabeledTable> train;
    if (opts.train_csv) {
        train = read_labeled_csv(*opts.train_csv);
        if (train->covariate_names.size() != theta.dim())
            throw SchemaError("training file does not match the model dimension");
    }

    const PredictionReport rep =
        evaluate_predictions(theta, test.rows, train ? &train->rows : nullptr, p_estimate);

    if (opts.roc_csv) {
        std::vector<double> scores;
        std::vector<int> labels;
        for (const auto& r : test.rows) {
            scores.push_back(phi(r.x, theta));
            labels.push_back(r.y);
        }
        std::string csv = "threshold,fpr,tpr\n";
        for (const auto& p : roc_points(scores, labels))
            csv += format_double(p.threshold) + ',' + format_double(p.fpr) + ',' + format_double(p.tpr) + '\n';
        write_text_file(*opts.roc_csv, csv);
    }

    json out;
    out["auc"] = rep.auc;
    out["cutoff"] = rep.cutoff;
    out["cutoff_source"] = opts.train_csv ? "train" : "test";
    out["accuracy"] = rep.accuracy;
    out["recall"] = optional_number(rep.recall);
    out["precision"] = optional_number(rep.precision);
    out["f1"] = optional_number(rep.f1);
    out["mad"] = rep.mad;
    out["p_estimate"] = rep.p_estimate;
    out["p_estimate_source"] = p_estimate ? "case_proportion" : "mean_score";
    out["p_observed"] = rep.p_observed;
    out["p_bias"] = rep.p_bias;
    out["p_abs_bias"] = rep.p_abs_bias;
    out["n_test"] = test.rows.size();
    out["warnings"] = rep.warnings;
    return out;
}

}  // namespace ccsemi
