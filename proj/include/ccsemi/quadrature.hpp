#pragma once

#include <cstddef>
#include <vector>

#include "ccsemi/types.hpp"

namespace ccsemi {

/// Gauss-Hermite rule for the weight exp(-x^2): sum_i w_i f(x_i)
/// approximates the integral of f(x) exp(-x^2) over the real line.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Golub-Welsch construction; exact for polynomials of degree < 2 * order.
GaussHermiteRule gauss_hermite(std::size_t order);

/// E[f(Z)] for Z ~ N(mean, sd^2) with the given rule.
template <class F>
double normal_expectation(const GaussHermiteRule& rule, double mean, double sd, F&& f);

/// P(Y = 1) when X has independent standard normal coordinates.
/// alpha + beta'X is N(alpha, |beta|^2), so a one-dimensional rule of
/// order 200 gives the value to about 1e-14.
double true_case_proportion(const Theta& theta);

}  // namespace ccsemi

#include <cmath>
#include <numbers>

template <class F>
double ccsemi::normal_expectation(const GaussHermiteRule& rule, double mean, double sd, F&& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mean + std::numbers::sqrt2 * sd * rule.nodes[i]);
    return acc * std::numbers::inv_sqrtpi;
}
