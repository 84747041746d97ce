#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sphanova/constants.hpp"

namespace sphanova {

/// Gegenbauer parameter; the sphere modules use alpha = (d-1)/2.
struct GegenbauerParam {
    double alpha;
    explicit GegenbauerParam(double a) : alpha(a) {
        if (!(a > -0.5)) throw std::domain_error("GegenbauerParam: alpha > -1/2 required");
    }
};

/// Jacobi parameters alpha, beta > -1.
struct JacobiParam {
    double alpha;
    double beta;
    JacobiParam(double a, double b) : alpha(a), beta(b) {
        if (!(a > -1.0) || !(b > -1.0))
            throw std::domain_error("JacobiParam: alpha, beta > -1 required");
    }
};

/// C_k^alpha(x) by the standard forward three-term recurrence
///   k C_k = 2x(k+alpha-1) C_{k-1} - (k+2alpha-2) C_{k-2},
/// with C_0 = 1, C_1 = 2 alpha x.
inline double gegenbauer(int k, GegenbauerParam p, double x) {
    if (k < 0) throw std::invalid_argument("gegenbauer: k must be >= 0");
    if (std::abs(x) > 1.0 + 1e-12) throw std::domain_error("gegenbauer: |x| <= 1 required");
    if (k == 0) return 1.0;
    double prev = 1.0;
    double cur = 2.0 * p.alpha * x;
    for (int n = 2; n <= k; ++n) {
        const double next = (2.0 * x * (n + p.alpha - 1.0) * cur - (n + 2.0 * p.alpha - 2.0) * prev) / n;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Classical Jacobi polynomial P_j^{alpha,beta}(t), normalized so that
/// P_j(1) = binom(j+alpha, j).
inline double jacobi(int j, JacobiParam p, double t) {
    if (j < 0) throw std::invalid_argument("jacobi: j must be >= 0");
    if (std::abs(t) > 1.0 + 1e-12) throw std::domain_error("jacobi: |t| <= 1 required");
    if (j == 0) return 1.0;
    const double a = p.alpha, b = p.beta;
    double prev = 1.0;
    double cur = (a + 1.0) + (a + b + 2.0) * (t - 1.0) / 2.0;
    for (int n = 2; n <= j; ++n) {
        const double apb = a + b;
        const double c1 = 2.0 * n * (n + apb) * (2.0 * n + apb - 2.0);
        const double c2 = (2.0 * n + apb - 1.0) * (a * a - b * b);
        const double c3 = (2.0 * n + apb - 1.0) * (2.0 * n + apb) * (2.0 * n + apb - 2.0);
        const double c4 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * (2.0 * n + apb);
        const double next = ((c2 + c3 * t) * cur - c4 * prev) / c1;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Legendre P_n(x) and its derivative, used by the Gauss-Legendre solver.
inline std::pair<double, double> legendre_with_derivative(int n, double x) {
    double prev = 1.0, cur = x;
    if (n == 0) return {1.0, 0.0};
    for (int k = 2; k <= n; ++k) {
        const double next = ((2.0 * k - 1.0) * x * cur - (k - 1.0) * prev) / k;
        prev = cur;
        cur = next;
    }
    const double deriv = n * (x * cur - prev) / (x * x - 1.0);
    return {cur, deriv};
}

/// n-point Gauss-Legendre rule on [-1, 1]; exact for polynomials of
/// degree <= 2n-1. Nodes by Newton iteration from the Chebyshev guess.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_nodes(int n) {
    if (n < 1 || n > 256) throw std::invalid_argument("gauss_legendre_nodes: 1 <= n <= 256");
    std::vector<double> nodes(static_cast<size_t>(n)), weights(static_cast<size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double deriv = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            auto [value, d1] = legendre_with_derivative(n, x);
            deriv = d1;
            const double step = value / d1;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        deriv = legendre_with_derivative(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[static_cast<size_t>(n - 1 - i)] = x;
        weights[static_cast<size_t>(n - 1 - i)] = w;
        nodes[static_cast<size_t>(i)] = -x;
        weights[static_cast<size_t>(i)] = w;
    }
    if (n % 2 == 1) nodes[static_cast<size_t>(half - 1)] = 0.0;
    return {nodes, weights};
}

/// Integral over [-1,1] of f(x) (1-x^2)^{p/2} via the substitution
/// x = cos(phi), which makes the integrand smooth for half-integer p:
///   int f(x) (1-x^2)^{p/2} dx = int_0^pi f(cos phi) sin(phi)^{p+1} dphi.
template <typename F>
double integrate_with_sphere_weight(F&& f, int power, int nodes = 128) {
    auto [x, w] = gauss_legendre_nodes(nodes);
    double sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double phi = 0.5 * kPi * (x[i] + 1.0); // map [-1,1] -> [0,pi]
        const double c = std::cos(phi), s = std::sin(phi);
        sum += w[i] * f(c) * std::pow(s, power + 1);
    }
    return 0.5 * kPi * sum;
}

/// Integral over [0,1] of f(r) (1-r^2)^{p/2} r^q via r = sin(psi).
template <typename F>
double integrate_radial_weight(F&& f, int p, int q, int nodes = 128) {
    auto [x, w] = gauss_legendre_nodes(nodes);
    double sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double psi = 0.25 * kPi * (x[i] + 1.0); // map [-1,1] -> [0,pi/2]
        const double r = std::sin(psi), c = std::cos(psi);
        sum += w[i] * f(r) * std::pow(c, p + 1) * std::pow(r, q);
    }
    return 0.25 * kPi * sum;
}

} // namespace sphanova
