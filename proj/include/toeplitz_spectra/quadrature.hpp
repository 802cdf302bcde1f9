/**
 * @file quadrature.hpp
 * @brief Gauss–Legendre rules.
 */
#pragma once

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace toeplitz_spectra {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [-1, 1], nodes ascending.
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    QuadratureRule rule;
    const auto positive = boost::math::legendre_p_zeros<double>(n);
    for (const double x : positive) {
        const double dp = boost::math::legendre_p_prime<double>(n, x);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes.push_back(x);
        rule.weights.push_back(w);
        if (x != 0.0) {
            rule.nodes.push_back(-x);
            rule.weights.push_back(w);
        }
    }
    std::vector<std::size_t> order(rule.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rule.nodes[a] < rule.nodes[b]; });
    QuadratureRule sorted;
    for (const std::size_t i : order) {
        sorted.nodes.push_back(rule.nodes[i]);
        sorted.weights.push_back(rule.weights[i]);
    }
    return sorted;
}

/// Rule mapped to [a, b].
inline QuadratureRule gauss_legendre(int n, double a, double b) {
    QuadratureRule r = gauss_legendre(n);
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (auto& x : r.nodes) x = c + h * x;
    for (auto& w : r.weights) w *= h;
    return r;
}

}  // namespace toeplitz_spectra
