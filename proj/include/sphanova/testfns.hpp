#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphanova/basis.hpp"
#include "sphanova/constants.hpp"
#include "sphanova/index_set.hpp"
#include "sphanova/orthopoly.hpp"
#include "sphanova/sphere.hpp"

namespace sphanova {

/// One of the benchmark functions, with the index sets its decomposition
/// is expected to concentrate on and whether the order-2, degree-10
/// catalog can represent it exactly.
struct NamedTestFunction {
    std::string name;
    std::function<double(const Eigen::VectorXd&)> eval;
    std::vector<IndexSet> expected_support;
    bool in_span_q2 = false;
};

/// A closed-form decomposition term on the ball B^{|u|}.
struct AnalyticTerm {
    TermIndex term;
    std::function<double(const Eigen::VectorXd&)> closed_form;
};

inline NamedTestFunction test_function(const std::string& name, int d = 10) {
    const int ambient = d + 1;
    NamedTestFunction f;
    f.name = name;
    if (name == "A") {
        f.eval = [](const Eigen::VectorXd& x) {
            return x[0] * std::pow(x[1], 3) + 2.0 * x[2] * std::pow(x[3], 5) + 0.05 * x[4];
        };
        f.expected_support = {IndexSet({1, 2}, ambient), IndexSet({3, 4}, ambient),
                              IndexSet({5}, ambient)};
        f.in_span_q2 = true;
    } else if (name == "B") {
        f.eval = [](const Eigen::VectorXd& x) { return x[1] * x[0] * x[0]; };
        f.expected_support = {IndexSet({2}, ambient), IndexSet({1, 2}, ambient)};
        f.in_span_q2 = true;
    } else if (name == "C") {
        f.eval = [](const Eigen::VectorXd& x) { return std::pow(x[0], 4) + x[1] * x[1]; };
        f.expected_support = {IndexSet({1}, ambient), IndexSet({2}, ambient)};
        f.in_span_q2 = true;
    } else if (name == "D") {
        f.eval = [](const Eigen::VectorXd& x) {
            return 5.0 * x[0] * x[1] * x[1] + x[3] + std::exp(x[2]) +
                   10.0 * std::sin(3.0 * kPi * x[4]) * std::pow(x[1], 4);
        };
        // The seven non-zero terms of the decomposition: 5 x1 x2^2 splits
        // into {1} and {1,2}, exp(x3) into the two parities of {3}, and
        // the sin(3 pi x5) x2^4 summand into {5} and {2,5}.
        f.expected_support = {IndexSet({1}, ambient),    IndexSet({3}, ambient),
                              IndexSet({4}, ambient),    IndexSet({5}, ambient),
                              IndexSet({1, 2}, ambient), IndexSet({2, 5}, ambient)};
        f.in_span_q2 = false;
    } else if (name == "E") {
        f.eval = [](const Eigen::VectorXd& x) {
            return std::sin(x[0]) + 7.0 * std::sin(x[1]) * std::sin(x[1]) +
                   0.1 * std::pow(x[2], 4) * std::sin(x[0]);
        };
        f.expected_support = {IndexSet({1}, ambient), IndexSet({2}, ambient),
                              IndexSet({1, 3}, ambient)};
        f.in_span_q2 = false;
    } else if (name == "F") {
        f.eval = [](const Eigen::VectorXd& x) {
            return x[0] * x[0] * x[1] * x[1] * x[2] * x[2];
        };
        f.expected_support = {IndexSet({1}, ambient),    IndexSet({2}, ambient),
                              IndexSet({3}, ambient),    IndexSet({1, 2}, ambient),
                              IndexSet({1, 3}, ambient), IndexSet({2, 3}, ambient)};
        f.in_span_q2 = false;
    } else {
        throw std::invalid_argument("test_function: unknown name '" + name + "'");
    }
    return f;
}

/// Closed-form decomposition terms for functions A, B and C; all other
/// terms of those functions are zero.
inline std::vector<AnalyticTerm> analytic_terms(const std::string& name, int d) {
    const int ambient = d + 1;
    std::vector<AnalyticTerm> terms;
    auto push = [&](std::initializer_list<int> u, std::uint64_t xi_bits,
                    std::function<double(const Eigen::VectorXd&)> g) {
        terms.push_back({TermIndex{IndexSet(u, ambient), ParityVector(xi_bits, ambient)},
                         std::move(g)});
    };
    const double dd = d;
    if (name == "A") {
        push({}, 0, [](const Eigen::VectorXd&) { return 0.0; });
        push({1, 2}, 0b11,
             [](const Eigen::VectorXd& y) { return y[0] * std::pow(y[1], 3); });
        push({3, 4}, 0b1100,
             [](const Eigen::VectorXd& y) { return 2.0 * y[0] * std::pow(y[1], 5); });
        push({5}, 0b10000, [](const Eigen::VectorXd& y) { return 0.05 * y[0]; });
    } else if (name == "B") {
        push({2}, 0b10,
             [dd](const Eigen::VectorXd& y) { return (y[0] - std::pow(y[0], 3)) / dd; });
        push({1, 2}, 0b10, [dd](const Eigen::VectorXd& y) {
            return y[1] * y[0] * y[0] - y[1] / dd + std::pow(y[1], 3) / dd;
        });
    } else if (name == "C") {
        // Mean of x1^4 + x2^2: 3/((d+3)(d+1)) + (d+3)/((d+3)(d+1)).
        const double c0 = (d + 6.0) / ((d + 3.0) * (d + 1.0));
        const double c1 = 3.0 / ((d + 3.0) * (d + 1.0));
        const double c2 = 1.0 / (d + 1.0);
        push({}, 0, [c0](const Eigen::VectorXd&) { return c0; });
        push({1}, 0, [c1](const Eigen::VectorXd& y) { return std::pow(y[0], 4) - c1; });
        push({2}, 0, [c2](const Eigen::VectorXd& y) { return y[0] * y[0] - c2; });
    } else {
        throw std::invalid_argument("analytic_terms: closed forms exist only for A, B, C");
    }
    return terms;
}

/// Variance of a closed-form term under the uniform measure on S^d:
/// the weighted square integral over the ball of the term's variables,
/// with fixed quadrature (256 nodes in 1-D, 128 x 256 tensor in 2-D).
inline double oracle_term_variance(const AnalyticTerm& term, int d) {
    const int order = term.term.u.order();
    if (order > 2) throw std::invalid_argument("oracle_term_variance: |u| <= 2 required");
    if (order == 0) return 0.0;
    const double omega_d = surface_area(d);
    if (order == 1) {
        return surface_area(d - 1) / omega_d *
               integrate_with_sphere_weight(
                   [&](double t) {
                       Eigen::VectorXd y(1);
                       y[0] = t;
                       const double v = term.closed_form(y);
                       return v * v;
                   },
                   d - 2, 256);
    }
    const int angular_nodes = 256;
    double sum = 0.0;
    for (int k = 0; k < angular_nodes; ++k) {
        const double theta = kTwoPi * (k + 0.5) / angular_nodes;
        const double c = std::cos(theta), s = std::sin(theta);
        sum += integrate_radial_weight(
            [&](double r) {
                Eigen::VectorXd y(2);
                y[0] = r * c;
                y[1] = r * s;
                const double v = term.closed_form(y);
                return v * v;
            },
            d - 3, 1, 128);
    }
    return surface_area(d - 2) / omega_d * (kTwoPi / angular_nodes) * sum;
}

} // namespace sphanova
