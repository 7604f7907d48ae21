#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccsemi/types.hpp"

namespace ccsemi {

/// phi(x_i; theta) for every row.
std::vector<double> predict_proba(const Theta& theta, const CovariateMatrix& xs);
std::vector<double> predict_proba(const Theta& theta, const std::vector<std::vector<double>>& xs);

/// Mann-Whitney estimate of P(case score > control score) + P(tie) / 2 via
/// midrank sums. Throws ArgumentError unless both classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Observed score s maximizing TPR - FPR for the rule score >= s; ties go
/// to the larger s. Throws ArgumentError unless both classes are present.
double youden_cutoff(std::span<const double> scores, std::span<const int> labels);

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct ClassificationMetrics {
    ConfusionCounts counts;
    double accuracy = 0.0;
    /// Absent without actual positives.
    std::optional<double> recall;
    /// Absent without predicted positives.
    std::optional<double> precision;
    /// Absent when precision or recall is.
    std::optional<double> f1;
};

/// Predictions are score >= cutoff.
ClassificationMetrics classification_metrics(std::span<const double> scores,
                                             std::span<const int> labels, double cutoff);

/// Mean of |y_i - prob_i|.
double mad(std::span<const double> probs, std::span<const int> labels);

struct RocPoint {
    double threshold;
    double fpr;
    double tpr;
};

/// One point per distinct score (rule score >= threshold), from the
/// largest threshold down, preceded by (inf, 0, 0).
std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> labels);

struct PredictionReport {
    double auc = 0.0;
    double cutoff = 0.0;
    double accuracy = 0.0;
    std::optional<double> recall;
    std::optional<double> precision;
    std::optional<double> f1;
    double mad = 0.0;
    /// Estimated P(Y = 1) minus the test-set prevalence, and its absolute value.
    double p_estimate = 0.0;
    double p_observed = 0.0;
    double p_bias = 0.0;
    double p_abs_bias = 0.0;
    std::vector<std::string> warnings;
};

/// Scores the test rows with theta. The cutoff comes from the training
/// rows when given, otherwise from the test rows (with a warning).
/// `p_estimate` defaults to the mean predicted probability on the test rows.
PredictionReport evaluate_predictions(const Theta& theta,
                                      const std::vector<LabeledObservation>& test,
                                      const std::vector<LabeledObservation>* train = nullptr,
                                      std::optional<double> p_estimate = std::nullopt);

}  // namespace ccsemi
