#include "ccsemi/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "ccsemi/baseline.hpp"
#include "ccsemi/error.hpp"
#include "ccsemi/inference.hpp"
#include "ccsemi/model.hpp"
#include "ccsemi/quadrature.hpp"

namespace ccsemi {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view text, std::size_t line, std::string_view key) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError("line " + std::to_string(line) + ": bad value for " + std::string(key) +
                             ": '" + std::string(text) + "'",
                         line);
    return value;
}

}  // namespace

std::size_t SimulationScenario::unlabeled_count() const {
    const std::size_t n = labeled_count();
    if (total_count) {
        if (*total_count < n) throw ArgumentError("N is smaller than the labeled sample");
        return *total_count - n;
    }
    return static_cast<std::size_t>(std::llround(unlabeled_ratio.value_or(0.0) * static_cast<double>(n)));
}

void SimulationScenario::validate() const {
    if (n0 < 1 || n1 < 1) throw ArgumentError("scenario needs n0 >= 1 and n1 >= 1");
    if (replications < 1) throw ArgumentError("scenario needs at least one replication");
    if (beta.empty()) throw ArgumentError("scenario needs at least one slope");
    if (unlabeled_ratio && total_count) throw ArgumentError("give either ratio or N, not both");
    if (unlabeled_ratio && !(*unlabeled_ratio >= 0.0 && std::isfinite(*unlabeled_ratio)))
        throw ArgumentError("ratio must be a non-negative number");
    if (!theta().is_finite()) throw ArgumentError("scenario parameters must be finite");
    (void)unlabeled_count();
}

SimulationScenario parse_scenario(std::string_view text) {
    SimulationScenario s;
    std::size_t line_no = 0;
    bool have[5] = {false, false, false, false, false};  // alpha beta n0 n1 size
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected key = value", line_no);
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));

        if (key == "name") {
            s.name = std::string(value);
        } else if (key == "alpha") {
            s.alpha = parse_number<double>(value, line_no, key);
            have[0] = true;
        } else if (key == "beta") {
            s.beta.clear();
            std::string_view rest = value;
            while (!rest.empty()) {
                const auto sep = rest.find_first_of(", \t");
                const std::string_view item = trim(rest.substr(0, sep));
                if (!item.empty()) s.beta.push_back(parse_number<double>(item, line_no, key));
                rest = sep == std::string_view::npos ? std::string_view{} : rest.substr(sep + 1);
            }
            have[1] = !s.beta.empty();
        } else if (key == "n0") {
            s.n0 = parse_number<std::size_t>(value, line_no, key);
            have[2] = true;
        } else if (key == "n1") {
            s.n1 = parse_number<std::size_t>(value, line_no, key);
            have[3] = true;
        } else if (key == "ratio") {
            if (s.total_count) throw ParseError("line " + std::to_string(line_no) + ": ratio and N both given", line_no);
            s.unlabeled_ratio = parse_number<double>(value, line_no, key);
            have[4] = true;
        } else if (key == "N") {
            if (s.unlabeled_ratio) throw ParseError("line " + std::to_string(line_no) + ": ratio and N both given", line_no);
            s.total_count = parse_number<std::size_t>(value, line_no, key);
            have[4] = true;
        } else if (key == "replications") {
            s.replications = parse_number<std::size_t>(value, line_no, key);
        } else if (key == "seed") {
            s.seed = parse_number<std::uint64_t>(value, line_no, key);
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'",
                             line_no);
        }
    }
    static constexpr const char* kRequired[] = {"alpha", "beta", "n0", "n1", "ratio or N"};
    for (int i = 0; i < 5; ++i)
        if (!have[i]) throw ParseError(std::string("missing key: ") + kRequired[i], line_no);
    try {
        s.validate();
    } catch (const ArgumentError& e) {
        throw ParseError(e.what(), line_no);
    }
    return s;
}

SimulationScenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    SimulationScenario s = parse_scenario(buf.str());
    if (s.name.empty()) s.name = path.stem().string();
    return s;
}

GeneratedData generate_dataset(const SimulationScenario& scenario, Philox4x64& rng) {
    scenario.validate();
    const std::size_t dim = scenario.covariate_dim();
    const Theta theta = scenario.theta();
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<LabeledObservation> cases, controls;
    cases.reserve(scenario.n1);
    controls.reserve(scenario.n0);
    std::size_t draws = 0;
    std::vector<double> x(dim);
    while (cases.size() < scenario.n1 || controls.size() < scenario.n0) {
        for (double& v : x) v = normal(rng);
        const bool is_case = uniform01(rng) < phi(x, theta);
        ++draws;
        if (is_case && cases.size() < scenario.n1) cases.push_back({1, x});
        if (!is_case && controls.size() < scenario.n0) controls.push_back({0, x});
    }
    std::vector<LabeledObservation> labeled = std::move(cases);
    labeled.insert(labeled.end(), controls.begin(), controls.end());

    std::vector<std::vector<double>> unlabeled(scenario.unlabeled_count(), std::vector<double>(dim));
    for (auto& row : unlabeled)
        for (double& v : row) v = normal(rng);

    return {SemiSupervisedDataset(std::move(labeled), std::move(unlabeled)),
            true_case_proportion(theta), draws};
}

std::string_view estimator_name(Estimator e) {
    return e == Estimator::proposed ? "proposed" : "single_cc";
}

Estimator parse_estimator(std::string_view name) {
    if (name == "proposed") return Estimator::proposed;
    if (name == "single_cc" || name == "single") return Estimator::single_cc;
    throw ArgumentError("unknown estimator '" + std::string(name) + "'");
}

SimulationSummary summarize(std::span<const ReplicationRecord> records, std::span<const double> truth,
                            double p_true) {
    if (records.empty()) throw ArgumentError("no replications to summarize");
    const std::size_t d = truth.size();
    for (const auto& r : records)
        if (r.estimate.size() != d || r.ese.size() != d || r.covered.size() != d)
            throw ArgumentError("replication record does not match the parameter count");

    const double reps = static_cast<double>(records.size());
    SimulationSummary s;
    s.replications_used = records.size();
    s.parameters.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        double err = 0.0, ese = 0.0, hits = 0.0;
        for (const auto& r : records) {
            err += r.estimate[j] - truth[j];
            ese += r.ese[j];
            hits += r.covered[j] ? 1.0 : 0.0;
        }
        ParameterSummary& ps = s.parameters[j];
        ps.bias = err / reps;
        ps.ese = ese / reps;
        ps.cp = hits / reps;
        if (records.size() >= 2) {
            const double mean = ps.bias + truth[j];
            double ss = 0.0;
            for (const auto& r : records) ss += (r.estimate[j] - mean) * (r.estimate[j] - mean);
            ps.se = std::sqrt(ss / (reps - 1.0));
            ps.bias_mcse = *ps.se / std::sqrt(reps);
        }
    }
    double pb = 0.0, pab = 0.0;
    for (const auto& r : records) {
        pb += r.p_hat - p_true;
        pab += std::fabs(r.p_hat - p_true);
    }
    s.p_bias = pb / reps;
    s.p_abs_bias = pab / reps;
    return s;
}

namespace {

ReplicationRecord make_record(const Eigen::VectorXd& est, const Eigen::VectorXd& se, double p_hat,
                              const std::vector<double>& truth, double z) {
    ReplicationRecord r;
    r.p_hat = p_hat;
    for (Eigen::Index j = 0; j < est.size(); ++j) {
        r.estimate.push_back(est(j));
        r.ese.push_back(se(j));
        r.covered.push_back(std::fabs(est(j) - truth[static_cast<std::size_t>(j)]) <= z * se(j));
    }
    return r;
}

std::optional<ReplicationRecord> run_estimator(Estimator e, const GeneratedData& g,
                                               const std::vector<double>& truth, double z,
                                               const StudyOptions& opts) {
    try {
        if (e == Estimator::proposed) {
            const FitResult fit = fit_mle(g.data, opts.solver);
            const auto se = fit.standard_errors();
            if (!se || !fit.converged) return std::nullopt;
            return make_record(fit.theta_hat.to_vector(), *se, fit.case_proportion, truth, z);
        }
        const ProspectiveFit fit = fit_prospective(g.data.covariates(), g.data.labels(),
                                                   {.divergence_bound = opts.solver.divergence_bound});
        const Eigen::VectorXd se = fit.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
        if (!se.allFinite()) return std::nullopt;
        // Without unlabeled data the natural plug-in is the mean fitted
        // probability over the labeled rows.
        const std::size_t n = g.data.labeled_count();
        const LinkValues link = evaluate_link(fit.theta, g.data.covariates().slice_rows(0, n));
        double p_hat = 0.0;
        for (double v : link.phi) p_hat += v;
        p_hat /= static_cast<double>(n);
        return make_record(fit.theta.to_vector(), se, p_hat, truth, z);
    } catch (const NumericalError&) {
        return std::nullopt;
    } catch (const ArgumentError&) {
        return std::nullopt;
    }
}

}  // namespace

StudyResult run_study(const SimulationScenario& scenario, const StudyOptions& opts) {
    scenario.validate();
    if (opts.estimators.empty()) throw ArgumentError("no estimators requested");
    if (!(opts.level > 0.0 && opts.level < 1.0)) throw ArgumentError("level must lie in (0, 1)");

    StudyResult result;
    result.scenario = scenario;
    result.p_true = true_case_proportion(scenario.theta());
    const std::size_t reps = scenario.replications;
    const std::size_t n_est = opts.estimators.size();
    result.records.assign(n_est, std::vector<std::optional<ReplicationRecord>>(reps));

    const Eigen::VectorXd truth_vec = scenario.theta().to_vector();
    const std::vector<double> truth(truth_vec.data(), truth_vec.data() + truth_vec.size());
    const double z = normal_quantile(0.5 * (1.0 + opts.level));

    auto run_one = [&](std::size_t r) {
        Philox4x64 rng = Philox4x64::substream(scenario.seed, r);
        const GeneratedData g = generate_dataset(scenario, rng);
        for (std::size_t e = 0; e < n_est; ++e)
            result.records[e][r] = run_estimator(opts.estimators[e], g, truth, z, opts);
    };

    unsigned threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
    if (threads <= 1) {
        for (std::size_t r = 0; r < reps; ++r) run_one(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t r = next++; r < reps; r = next++) run_one(r);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    // Aggregation walks replications in index order, so the summary does not
    // depend on the schedule above.
    for (std::size_t e = 0; e < n_est; ++e) {
        std::vector<ReplicationRecord> ok;
        for (const auto& rec : result.records[e])
            if (rec) ok.push_back(*rec);
        const std::size_t failures = reps - ok.size();
        SimulationSummary s;
        if (!ok.empty()) s = summarize(ok, truth, result.p_true);
        s.estimator = std::string(estimator_name(opts.estimators[e]));
        s.replication_failures = failures;
        if (static_cast<double>(failures) > opts.max_failure_rate * static_cast<double>(reps))
            result.failed = true;
        result.summaries.push_back(std::move(s));
    }
    return result;
}

}  // namespace ccsemi
