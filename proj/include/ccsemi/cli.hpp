#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "ccsemi/simulation.hpp"
#include "ccsemi/solver.hpp"
#include "ccsemi/types.hpp"

namespace ccsemi {

struct FitCommandOptions {
    SolverOptions solver;
    double level = 0.95;
};

/// JSON report of a fit: estimates, standard errors, Wald intervals,
/// case proportion, log-likelihood, iteration count and warnings.
nlohmann::ordered_json fit_report(const FitResult& fit, const SemiSupervisedDataset& data,
                                  double level);

/// Reads the CSV files, fits, and returns fit_report. Throws ParseError,
/// SchemaError (covariate counts differ) or DataError (a class is empty).
nlohmann::ordered_json cmd_fit(const std::filesystem::path& labeled_csv,
                               const std::optional<std::filesystem::path>& unlabeled_csv,
                               const FitCommandOptions& opts = {});

struct SimulateCommandOptions {
    StudyOptions study;
    std::optional<std::size_t> replications;
    std::optional<std::uint64_t> seed;
};

nlohmann::ordered_json simulation_report(const StudyResult& result);

nlohmann::ordered_json cmd_simulate(const std::filesystem::path& scenario_file,
                                    const SimulateCommandOptions& opts = {});

struct PredictCommandOptions {
    std::optional<std::filesystem::path> train_csv;
    /// Writes threshold,fpr,tpr rows for the test set when set.
    std::optional<std::filesystem::path> roc_csv;
};

/// Scores a labeled test CSV with the theta stored in a fit report.
nlohmann::ordered_json cmd_predict(const std::filesystem::path& model_json,
                                   const std::filesystem::path& test_csv,
                                   const PredictCommandOptions& opts = {});

/// theta_hat from a fit report.
Theta theta_from_report(const nlohmann::ordered_json& report);

}  // namespace ccsemi
