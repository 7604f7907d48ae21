#include "ccsemi/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "ccsemi/error.hpp"
#include "ccsemi/model.hpp"

namespace ccsemi {
namespace {

struct ClassSizes {
    std::size_t cases = 0;
    std::size_t controls = 0;
};

ClassSizes check_inputs(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ArgumentError("scores and labels differ in length");
    ClassSizes c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw ArgumentError("labels must be 0 or 1");
        if (std::isnan(scores[i])) throw ArgumentError("scores must not be NaN");
        (labels[i] == 1 ? c.cases : c.controls) += 1;
    }
    return c;
}

ClassSizes require_both(std::span<const double> scores, std::span<const int> labels) {
    const ClassSizes c = check_inputs(scores, labels);
    if (c.cases == 0 || c.controls == 0) throw ArgumentError("both classes must be present");
    return c;
}

/// Indices ordered by decreasing score.
std::vector<std::size_t> order_desc(std::span<const double> scores) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return idx;
}

}  // namespace

std::vector<double> predict_proba(const Theta& theta, const CovariateMatrix& xs) {
    return evaluate_link(theta, xs).phi;
}

std::vector<double> predict_proba(const Theta& theta, const std::vector<std::vector<double>>& xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(phi(x, theta));
    return out;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    const ClassSizes c = require_both(scores, labels);
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Twice the rank sum of the cases, so midranks stay integral.
    std::uint64_t twice_rank_sum = 0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        std::size_t cases_in_group = 0;
        while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) cases_in_group += labels[idx[j++]] == 1;
        // Ranks i+1..j average to (i + 1 + j) / 2.
        twice_rank_sum += cases_in_group * (i + 1 + j);
        i = j;
    }
    const std::uint64_t n1 = c.cases;
    const std::uint64_t twice_u = twice_rank_sum - n1 * (n1 + 1);
    return static_cast<double>(twice_u) / 2.0 / (static_cast<double>(c.cases) * static_cast<double>(c.controls));
}

double youden_cutoff(std::span<const double> scores, std::span<const int> labels) {
    const ClassSizes c = require_both(scores, labels);
    const auto idx = order_desc(scores);
    // TPR - FPR at count (tp, fp) compares exactly as tp * n0 - fp * n1.
    const auto n0 = static_cast<std::int64_t>(c.controls);
    const auto n1 = static_cast<std::int64_t>(c.cases);
    std::int64_t tp = 0, fp = 0;
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    double best_cut = scores[idx.front()];
    for (std::size_t i = 0; i < idx.size();) {
        const double s = scores[idx[i]];
        while (i < idx.size() && scores[idx[i]] == s) (labels[idx[i++]] == 1 ? tp : fp) += 1;
        const std::int64_t j = tp * n0 - fp * n1;
        // Thresholds arrive in decreasing order: strict improvement keeps the larger one.
        if (j > best) {
            best = j;
            best_cut = s;
        }
    }
    return best_cut;
}

ClassificationMetrics classification_metrics(std::span<const double> scores, std::span<const int> labels,
                                             double cutoff) {
    if (!std::isfinite(cutoff)) throw ArgumentError("cutoff must be finite");
    check_inputs(scores, labels);
    ClassificationMetrics m;
    auto& k = m.counts;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] >= cutoff;
        if (labels[i] == 1)
            (pred ? k.tp : k.fn) += 1;
        else
            (pred ? k.fp : k.tn) += 1;
    }
    const std::size_t total = scores.size();
    if (total == 0) throw ArgumentError("no observations");
    m.accuracy = static_cast<double>(k.tp + k.tn) / static_cast<double>(total);
    if (k.tp + k.fn > 0) m.recall = static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fn);
    if (k.tp + k.fp > 0) m.precision = static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fp);
    if (m.recall && m.precision) {
        const double s = *m.precision + *m.recall;
        m.f1 = s > 0.0 ? 2.0 * *m.precision * *m.recall / s : 0.0;
    }
    return m;
}

double mad(std::span<const double> probs, std::span<const int> labels) {
    check_inputs(probs, labels);
    if (probs.empty()) throw ArgumentError("no observations");
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) acc += std::fabs(static_cast<double>(labels[i]) - probs[i]);
    return acc / static_cast<double>(probs.size());
}

std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> labels) {
    const ClassSizes c = require_both(scores, labels);
    const auto idx = order_desc(scores);
    std::vector<RocPoint> out{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < idx.size();) {
        const double s = scores[idx[i]];
        while (i < idx.size() && scores[idx[i]] == s) (labels[idx[i++]] == 1 ? tp : fp) += 1;
        out.push_back({s, static_cast<double>(fp) / static_cast<double>(c.controls),
                       static_cast<double>(tp) / static_cast<double>(c.cases)});
    }
    return out;
}

PredictionReport evaluate_predictions(const Theta& theta, const std::vector<LabeledObservation>& test,
                                      const std::vector<LabeledObservation>* train,
                                      std::optional<double> p_estimate) {
    if (test.empty()) throw ArgumentError("test set is empty");
    auto score = [&](const std::vector<LabeledObservation>& rows, std::vector<double>& s, std::vector<int>& y) {
        s.clear();
        y.clear();
        for (const auto& r : rows) {
            s.push_back(phi(r.x, theta));
            y.push_back(r.y);
        }
    };

    PredictionReport rep;
    std::vector<double> s;
    std::vector<int> y;
    if (train) {
        score(*train, s, y);
        rep.cutoff = youden_cutoff(s, y);
    }
    std::vector<double> ts;
    std::vector<int> ty;
    score(test, ts, ty);
    if (!train) {
        rep.cutoff = youden_cutoff(ts, ty);
        rep.warnings.emplace_back("no training data given; cutoff chosen on the test set");
    }

    rep.auc = auc(ts, ty);
    const ClassificationMetrics m = classification_metrics(ts, ty, rep.cutoff);
    rep.accuracy = m.accuracy;
    rep.recall = m.recall;
    rep.precision = m.precision;
    rep.f1 = m.f1;
    rep.mad = mad(ts, ty);

    double mean_score = 0.0, prevalence = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mean_score += ts[i];
        prevalence += ty[i];
    }
    mean_score /= static_cast<double>(ts.size());
    prevalence /= static_cast<double>(ts.size());
    rep.p_estimate = p_estimate.value_or(mean_score);
    rep.p_observed = prevalence;
    rep.p_bias = rep.p_estimate - prevalence;
    rep.p_abs_bias = std::fabs(rep.p_bias);
    return rep;
}

}  // namespace ccsemi
