#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccsemi/rng.hpp"
#include "ccsemi/solver.hpp"
#include "ccsemi/types.hpp"

namespace ccsemi {

struct SimulationScenario {
    std::string name;
    double alpha = 0.0;
    std::vector<double> beta;
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    /// Exactly one of these sizes the unlabeled sample: ratio * n rows, or
    /// total_count - n rows.
    std::optional<double> unlabeled_ratio;
    std::optional<std::size_t> total_count;
    std::size_t replications = 1;
    std::uint64_t seed = 0;

    Theta theta() const { return Theta(alpha, beta); }
    std::size_t covariate_dim() const noexcept { return beta.size(); }
    std::size_t labeled_count() const noexcept { return n0 + n1; }
    std::size_t unlabeled_count() const;

    /// Throws ArgumentError on an inconsistent scenario.
    void validate() const;
};

/// `key = value` lines; `#` starts a comment. Keys: name, alpha, beta
/// (comma- or space-separated), n0, n1, ratio or N, replications, seed.
/// Throws ParseError naming the offending line.
SimulationScenario parse_scenario(std::string_view text);
SimulationScenario load_scenario(const std::filesystem::path& path);

struct GeneratedData {
    SemiSupervisedDataset data;
    double p_true = 0.0;
    /// (X, Y) draws consumed by the rejection sampler.
    std::size_t draws = 0;
};

/// Covariates are independent standard normals. Labeled rows come from
/// drawing (X, Y) with Y | X ~ Bernoulli(phi(X)) and keeping X until n1
/// cases and n0 controls are collected (cases first in the result);
/// unlabeled rows are fresh draws of X.
GeneratedData generate_dataset(const SimulationScenario& scenario, Philox4x64& rng);

enum class Estimator { proposed, single_cc };

std::string_view estimator_name(Estimator e);
Estimator parse_estimator(std::string_view name);

/// One estimator on one replication.
struct ReplicationRecord {
    std::vector<double> estimate;
    std::vector<double> ese;
    std::vector<bool> covered;
    double p_hat = 0.0;
};

struct ParameterSummary {
    double bias = 0.0;
    /// Sample standard deviation of the estimates; absent with one replication.
    std::optional<double> se;
    double ese = 0.0;
    double cp = 0.0;
    /// Monte Carlo standard error of `bias`; absent with one replication.
    std::optional<double> bias_mcse;
};

struct SimulationSummary {
    std::string estimator;
    /// alpha, beta_1, ..., beta_d
    std::vector<ParameterSummary> parameters;
    double p_bias = 0.0;
    double p_abs_bias = 0.0;
    std::size_t replications_used = 0;
    std::size_t replication_failures = 0;
};

/// Aggregates per-replication records against the true parameters.
/// Throws ArgumentError on empty or ragged input.
SimulationSummary summarize(std::span<const ReplicationRecord> records,
                            std::span<const double> truth, double p_true);

struct StudyOptions {
    std::vector<Estimator> estimators{Estimator::proposed, Estimator::single_cc};
    SolverOptions solver;
    double level = 0.95;
    /// 0 picks the hardware concurrency. Results do not depend on it.
    unsigned threads = 0;
    /// Fraction of failed replications above which the study fails.
    double max_failure_rate = 0.02;
};

struct StudyResult {
    SimulationScenario scenario;
    double p_true = 0.0;
    std::vector<SimulationSummary> summaries;
    /// records[e][r]: estimator e on replication r; empty when the fit failed.
    std::vector<std::vector<std::optional<ReplicationRecord>>> records;
    bool failed = false;
};

/// Replication r uses Philox4x64::substream(scenario.seed, r), so every
/// estimator sees the same data and the result is identical for any
/// thread count. A replication whose fit throws or yields no covariance
/// counts as a failure for that estimator.
StudyResult run_study(const SimulationScenario& scenario, const StudyOptions& opts = {});

}  // namespace ccsemi
