#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <catch_amalgamated.hpp>

#include "ccsemi/baseline.hpp"
#include "ccsemi/error.hpp"
#include "support/oracles.hpp"

using namespace ccsemi;

TEST_CASE("prospective fit solves the score equations") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto inst = oracle::random_instance(seed, 1 + seed % 3, 40, 60, 100);
        const auto lab = inst.data.labeled();
        const ProspectiveFit fit = fit_prospective(lab);
        const std::size_t d = inst.data.dim() + 1;
        std::vector<oracle::ld> score(d, 0.0L);
        Eigen::MatrixXd info = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (const auto& r : lab) {
            oracle::ld t = fit.theta.alpha;
            for (std::size_t k = 0; k + 1 < d; ++k) t += fit.theta.beta[k] * r.x[k];
            const oracle::ld ph = oracle::logistic(t);
            std::vector<double> xt{1.0};
            xt.insert(xt.end(), r.x.begin(), r.x.end());
            for (std::size_t k = 0; k < d; ++k) {
                score[k] += (r.y - ph) * xt[k];
                for (std::size_t l = 0; l < d; ++l)
                    info(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) +=
                        static_cast<double>(ph * (1.0L - ph)) * xt[k] * xt[l];
            }
        }
        for (auto s : score) CHECK(std::fabs(static_cast<double>(s)) <= 1e-8);
        const Eigen::MatrixXd want = info.inverse();
        CHECK((fit.cov - want).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + want.cwiseAbs().maxCoeff()));

        const ProspectiveFit other = fit_prospective(inst.data.covariates(), inst.data.labels());
        CHECK((other.theta.to_vector() - fit.theta.to_vector()).norm() <= 1e-12);
    }
}

TEST_CASE("prospective fit failure modes") {
    CHECK_THROWS_AS(fit_prospective(std::vector<LabeledObservation>{{1, {0.0}}, {1, {1.0}}}), DataError);
    std::vector<LabeledObservation> sep;
    for (int i = 0; i < 5; ++i) {
        sep.push_back({1, {1.0 + i}});
        sep.push_back({0, {-1.0 - i}});
    }
    CHECK_THROWS_AS(fit_prospective(sep), DivergenceError);
}

TEST_CASE("case-control intercept offset") {
    const double p = 0.0370735;
    CHECK(cc_intercept_offset(80, 400, p) == Catch::Approx(std::log(0.2) - std::log(p / (1.0 - p))).epsilon(1e-15));
    CHECK(cc_intercept_offset(50, 50, 0.5) == 0.0);
}
