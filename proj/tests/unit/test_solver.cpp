#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <catch_amalgamated.hpp>

#include "ccsemi/error.hpp"
#include "ccsemi/inference.hpp"
#include "ccsemi/model.hpp"
#include "ccsemi/solver.hpp"
#include "support/oracles.hpp"

using namespace ccsemi;

TEST_CASE("p-step at theta = 0 is uniform") {
    const auto inst = oracle::random_instance(1, 2, 10, 10, 40);
    std::vector<double> v(40);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i + 1);
    const JumpWeights p = JumpWeights(v).normalized();
    const JumpWeights out = p_step(inst.data, Theta::zeros(2), p);
    for (double x : out.values()) CHECK(x == Catch::Approx(1.0 / 40.0).epsilon(1e-14));
}

TEST_CASE("literal p-step on two atoms") {
    // phi = (0.9, 0.5) at theta = (0, 1), uniform p, so c = 0.7.
    const SemiSupervisedDataset d({{1, {std::log(9.0)}}, {0, {0.0}}}, {});
    const JumpWeights out = p_step(d, Theta(0.0, {1.0}), JumpWeights::uniform(2));
    CHECK(out[0] == Catch::Approx(1.0 / (0.9 / 0.7 + 0.1 / 0.3)).epsilon(1e-14));
    CHECK(out[0] == Catch::Approx(0.6176470588).epsilon(1e-9));
    CHECK(out[1] == Catch::Approx(0.42).epsilon(1e-14));
    CHECK(out.sum() == Catch::Approx(1.0376470588).epsilon(1e-9));
}

TEST_CASE("p-step rejects a degenerate mixture mean") {
    const auto inst = oracle::random_instance(2, 1, 5, 5, 20);
    CHECK_THROWS_AS(p_step(inst.data, Theta(-800.0, {0.0}), JumpWeights::uniform(20)), NumericalError);
}

TEST_CASE("renormalized p-step stays on the simplex") {
    const auto inst = oracle::random_instance(3, 2, 15, 20, 80);
    const JumpWeights out = p_step(inst.data, inst.truth, JumpWeights::uniform(80), true);
    CHECK(out.sum() == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(out.all_positive());
}

TEST_CASE("theta-step never lowers the objective and reaches a stationary point") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const auto inst = oracle::random_instance(seed, 2, 20, 25, 120);
        const JumpWeights p = JumpWeights::uniform(120);
        const Theta start(0.3, {-0.5, 0.5});
        const Theta out = theta_step(inst.data, p, start);
        CHECK(theta_objective(out, p, inst.data) >= theta_objective(start, p, inst.data));
        CHECK(grad_theta_objective(out, p, inst.data).norm() <= 1e-6);
    }
}

TEST_CASE("fit_mle ascends, converges and is stationary") {
    for (std::uint64_t seed = 10; seed < 18; ++seed) {
        const auto inst = oracle::random_instance(seed, 2, 30, 40, 250);
        const FitResult fit = fit_mle(inst.data);
        REQUIRE(fit.converged);
        for (std::size_t j = 1; j < fit.loglik_trace.size(); ++j)
            CHECK(fit.loglik_trace[j] >= fit.loglik_trace[j - 1] - 1e-9);
        CHECK(fit.loglik_trace.size() == static_cast<std::size_t>(fit.iterations) + 1);
        CHECK(fit.p_hat.sum() == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(fit.p_hat.all_positive());
        CHECK(fit.loglik == Catch::Approx(log_likelihood(fit.theta_hat, fit.p_hat, inst.data)).epsilon(1e-12));
        CHECK(fit.case_proportion ==
              Catch::Approx(case_proportion(fit.theta_hat, fit.p_hat, inst.data.covariates())).epsilon(1e-12));
        CHECK(grad_theta_objective(fit.theta_hat, fit.p_hat, inst.data).norm() <= 1e-5);
        // The jump weights are a fixed point of their own update.
        const JumpWeights again = p_step(inst.data, fit.theta_hat, fit.p_hat, true);
        for (std::size_t i = 0; i < again.size(); ++i)
            CHECK(again[i] == Catch::Approx(fit.p_hat[i]).epsilon(1e-4));
        REQUIRE(fit.theta_cov);
    }
}

TEST_CASE("fit_mle attains the profile maximum on a tiny instance") {
    const auto inst = oracle::random_instance(8, 1, 6, 6, 20);
    const auto rows = oracle::rows_of(inst.data);
    const FitResult fit = fit_mle(inst.data);
    REQUIRE(fit.converged);
    const double at_fit = static_cast<double>(oracle::profile_loglik(rows, oracle::to_ld(fit.theta_hat.to_vector())));
    CHECK(fit.loglik == Catch::Approx(at_fit).margin(1e-7));
    // Nearby theta values cannot do better.
    for (double da : {-0.05, 0.05})
        for (double db : {-0.05, 0.05}) {
            std::vector<oracle::ld> z{fit.theta_hat.alpha + da, fit.theta_hat.beta[0] + db};
            CHECK(static_cast<double>(oracle::profile_loglik(rows, z)) <= fit.loglik + 1e-9);
        }
}

TEST_CASE("a supremum at infinite intercept is reported, not fitted") {
    // Seed 5 at this size has l increasing without bound in -alpha at the
    // profiled p, so c heads to 0.
    const auto inst = oracle::random_instance(5, 1, 6, 6, 20);
    const auto rows = oracle::rows_of(inst.data);
    const oracle::ld far = oracle::profile_loglik(rows, {-12.0L, inst.truth.beta[0]});
    const oracle::ld near = oracle::profile_loglik(rows, {-6.0L, inst.truth.beta[0]});
    CHECK(far >= near);
    CHECK_THROWS_AS(fit_mle(inst.data), DivergenceError);
    SolverOptions opts;
    opts.boundary_tol = 0.7;
    CHECK_THROWS_AS(fit_mle(inst.data, opts), ArgumentError);
}

TEST_CASE("literal jump-weight updates reach the same maximum") {
    // Without renormalization the iterates leave the simplex, so l is not
    // monotone along the way; the limit is the same.
    SolverOptions opts;
    opts.renormalize_p = false;
    const auto inst = oracle::random_instance(31, 2, 25, 25, 150);
    const FitResult fit = fit_mle(inst.data, opts);
    const FitResult ref = fit_mle(inst.data);
    REQUIRE(fit.converged);
    CHECK((fit.theta_hat.to_vector() - ref.theta_hat.to_vector()).norm() <= 1e-5);
    CHECK(fit.loglik == Catch::Approx(ref.loglik).margin(1e-5));
    CHECK(std::fabs(fit.p_hat.sum() - 1.0) <= 1e-8);
    // The converged weights are a fixed point of the literal map.
    const JumpWeights again = p_step(inst.data, fit.theta_hat, fit.p_hat);
    CHECK(std::fabs(again.sum() - 1.0) <= 1e-8);
}

TEST_CASE("one more iteration at a converged fit stays within epsilon") {
    for (bool literal : {false, true}) {
        SolverOptions opts;
        opts.renormalize_p = !literal;
        const auto inst = oracle::random_instance(61, 2, 30, 30, 200);
        const FitResult fit = fit_mle(inst.data, opts);
        REQUIRE(fit.converged);
        const Theta t = theta_step(inst.data, fit.p_hat, fit.theta_hat, opts);
        const JumpWeights p = p_step(inst.data, t, fit.p_hat, opts.renormalize_p);
        CHECK((t.to_vector() - fit.theta_hat.to_vector()).norm() <= opts.epsilon);
        double dp = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) dp += (p[i] - fit.p_hat[i]) * (p[i] - fit.p_hat[i]);
        CHECK(std::sqrt(dp) <= opts.epsilon);
    }
}

TEST_CASE("jittered starting weights reach the same maximum") {
    std::mt19937_64 g(71);
    std::gamma_distribution<double> gamma(5.0, 1.0);
    for (std::uint64_t seed = 71; seed < 76; ++seed) {
        const auto inst = oracle::random_instance(seed, 1, 25, 25, 150);
        const FitResult ref = fit_mle(inst.data);
        std::vector<double> w(150);
        for (double& v : w) v = gamma(g);
        SolverOptions opts;
        opts.p_init = JumpWeights(w).normalized();
        const FitResult jittered = fit_mle(inst.data, opts);
        CHECK(std::fabs(jittered.loglik - ref.loglik) <= 1e-5);
    }
}

TEST_CASE("fit_mle honors starting values and reports warnings") {
    const auto inst = oracle::random_instance(41, 1, 20, 20, 100);
    SolverOptions opts;
    opts.theta_init = inst.truth;
    opts.max_iterations = 1;
    const FitResult one = fit_mle(inst.data, opts);
    CHECK_FALSE(one.converged);
    CHECK_FALSE(one.warnings.empty());

    const auto labeled_only = SemiSupervisedDataset(inst.data.labeled(), {});
    const FitResult lone = fit_mle(labeled_only);
    bool saw = false;
    for (const auto& w : lone.warnings) saw |= w.find("unlabeled") != std::string::npos;
    CHECK(saw);

    SolverOptions bad;
    bad.theta_init = Theta(0.0, {0.0, 0.0});
    CHECK_THROWS_AS(fit_mle(inst.data, bad), ArgumentError);
}

TEST_CASE("separable data do not yield a silent fit") {
    std::vector<LabeledObservation> lab;
    for (int i = 0; i < 10; ++i) lab.push_back({1, {1.0 + i}});
    for (int i = 0; i < 10; ++i) lab.push_back({0, {-1.0 - i}});
    std::vector<std::vector<double>> unl;
    for (int i = 0; i < 30; ++i) unl.push_back({0.37 * i - 5.0});
    const SemiSupervisedDataset d(lab, unl);
    try {
        const FitResult fit = fit_mle(d);
        CHECK_FALSE(fit.warnings.empty());
    } catch (const DivergenceError& e) {
        CHECK(e.norm() > 50.0);
    }
}
