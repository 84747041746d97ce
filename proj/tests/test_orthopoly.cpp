#include <gtest/gtest.h>

#include <cmath>

#include "sphanova/orthopoly.hpp"
#include "sphanova/rng.hpp"

using namespace sphanova;

namespace {

// Explicit sum formula for C_k^alpha, the oracle for the recurrence:
//   C_k(x) = 1/Gamma(alpha) sum_i (-1)^i Gamma(alpha+k-i) / (i! (k-2i)!) (2x)^{k-2i}.
double gegenbauer_explicit(int k, double alpha, double x) {
    double sum = 0.0;
    for (int i = 0; 2 * i <= k; ++i) {
        const double term = std::exp(std::lgamma(alpha + k - i) - std::lgamma(alpha) -
                                     std::lgamma(i + 1.0) - std::lgamma(k - 2 * i + 1.0)) *
                            std::pow(2.0 * x, k - 2 * i);
        sum += (i % 2 == 0) ? term : -term;
    }
    return sum;
}

// Jacobi weight integral by a substitution that removes the half-integer
// endpoint singularity: with t = 1 - 2 s^2,
//   int_{-1}^{1} h(t) (1-t)^a (1+t)^b dt
//     = 2^{a+b+2} int_0^1 h(1-2s^2) s^{2a+1} (1-s^2)^b ds,
// which is a polynomial integrand whenever 2a and b are integers.
template <typename F>
double integrate_jacobi_weight(F&& h, double a, double b, int n) {
    auto [x, w] = gauss_legendre_nodes(n);
    double sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double s = 0.5 * (x[i] + 1.0);
        sum += 0.5 * w[i] * h(1.0 - 2.0 * s * s) * std::pow(s, 2.0 * a + 1.0) *
               std::pow(1.0 - s * s, b);
    }
    return std::pow(2.0, a + b + 2.0) * sum;
}

} // namespace

TEST(Gegenbauer, LowDegreeClosedForms) {
    for (double x : {-0.9, -0.2, 0.0, 0.4, 1.0}) {
        EXPECT_DOUBLE_EQ(gegenbauer(0, GegenbauerParam(1.3), x), 1.0);
    }
    EXPECT_NEAR(gegenbauer(1, GegenbauerParam(2.0), 0.5), 2.0, 1e-15);
    // C_2 = -alpha + 2 alpha (1+alpha) x^2
    EXPECT_NEAR(gegenbauer(2, GegenbauerParam(1.0), 1.0), 3.0, 1e-14);
}

TEST(Gegenbauer, MatchesExplicitSum) {
    Xoshiro256pp rng(123);
    for (double alpha : {0.5, 1.0, 2.5, 4.5, 5.5}) {
        for (int k = 0; k <= 8; ++k) {
            for (int trial = 0; trial < 20; ++trial) {
                const double x = 2.0 * rng.uniform01() - 1.0;
                const double rec = gegenbauer(k, GegenbauerParam(alpha), x);
                const double exp = gegenbauer_explicit(k, alpha, x);
                EXPECT_NEAR(rec, exp, 1e-10 * std::max(1.0, std::abs(exp)))
                    << "alpha=" << alpha << " k=" << k << " x=" << x;
            }
        }
    }
}

TEST(Gegenbauer, ParityInDegree) {
    Xoshiro256pp rng(7);
    const GegenbauerParam p(3.5);
    for (int k = 0; k <= 10; ++k) {
        for (int trial = 0; trial < 10; ++trial) {
            const double x = 2.0 * rng.uniform01() - 1.0;
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            EXPECT_NEAR(gegenbauer(k, p, -x), sign * gegenbauer(k, p, x), 1e-11);
        }
    }
}

// Orthogonality with respect to (1-x^2)^{alpha - 1/2}, the fiber weight of
// the one-dimensional terms, for every ambient dimension used downstream.
TEST(Gegenbauer, OrthogonalUnderSphereWeight) {
    for (int d = 2; d <= 12; ++d) {
        const GegenbauerParam p(0.5 * (d - 1));
        for (int k = 0; k <= 10; ++k)
            for (int l = k + 1; l <= 10; ++l) {
                const double inner = integrate_with_sphere_weight(
                    [&](double x) { return gegenbauer(k, p, x) * gegenbauer(l, p, x); }, d - 2,
                    128);
                EXPECT_LT(std::abs(inner), 1e-9) << "d=" << d << " k=" << k << " l=" << l;
            }
    }
}

TEST(Gegenbauer, RejectsBadArguments) {
    EXPECT_THROW(gegenbauer(-1, GegenbauerParam(1.0), 0.0), std::invalid_argument);
    EXPECT_THROW(gegenbauer(2, GegenbauerParam(1.0), 1.5), std::domain_error);
    EXPECT_THROW(GegenbauerParam(-0.5), std::domain_error);
}

TEST(Jacobi, LowDegreeClosedForms) {
    EXPECT_DOUBLE_EQ(jacobi(0, JacobiParam(0.7, -0.2), 0.3), 1.0);
    // Legendre endpoint: P_1^{0,0}(1) = 1.
    EXPECT_NEAR(jacobi(1, JacobiParam(0.0, 0.0), 1.0), 1.0, 1e-15);
    // P_1 = (alpha+1) + (alpha+beta+2)(t-1)/2 at generic parameters.
    const double a = 1.3, b = 2.1, t = -0.4;
    EXPECT_NEAR(jacobi(1, JacobiParam(a, b), t), (a + 1.0) + (a + b + 2.0) * (t - 1.0) / 2.0,
                1e-14);
}

TEST(Jacobi, EndpointNormalization) {
    // P_j(1) = binom(j + alpha, j)
    for (int j = 0; j <= 6; ++j) {
        const double a = 2.5, b = 1.0;
        const double expected =
            std::exp(std::lgamma(j + a + 1.0) - std::lgamma(a + 1.0) - std::lgamma(j + 1.0));
        EXPECT_NEAR(jacobi(j, JacobiParam(a, b), 1.0), expected, 1e-12 * expected);
    }
}

TEST(Jacobi, OrthogonalUnderJacobiWeight) {
    const double a = 1.5, b = 2.0;
    const double inner = integrate_jacobi_weight(
        [&](double t) { return jacobi(1, JacobiParam(a, b), t) * jacobi(2, JacobiParam(a, b), t); },
        a, b, 64);
    EXPECT_LT(std::abs(inner), 1e-10);

    for (int j = 0; j <= 5; ++j)
        for (int l = j + 1; l <= 5; ++l) {
            const double v = integrate_jacobi_weight(
                [&](double t) {
                    return jacobi(j, JacobiParam(a, b), t) * jacobi(l, JacobiParam(a, b), t);
                },
                a, b, 64);
            EXPECT_LT(std::abs(v), 1e-9) << j << "," << l;
        }
}

// The radial substitution identity: for t = 2r^2 - 1 the Jacobi family is
// orthogonal under (1-r^2)^alpha r^{2 beta + 1} on [0, 1]. This is the
// identity behind the two-dimensional radial basis.
TEST(Jacobi, RadialSubstitutionOrthogonality) {
    for (int d = 3; d <= 12; ++d) {
        const double alpha = 0.5 * (d - 3);
        for (int m = 0; m <= 4; ++m) {
            const JacobiParam p(alpha, static_cast<double>(m));
            for (int j = 0; j <= 5; ++j)
                for (int l = j + 1; l <= 5; ++l) {
                    const double inner = integrate_radial_weight(
                        [&](double r) {
                            const double t = 2.0 * r * r - 1.0;
                            return jacobi(j, p, t) * jacobi(l, p, t);
                        },
                        d - 3, 2 * m + 1, 128);
                    EXPECT_LT(std::abs(inner), 1e-9)
                        << "d=" << d << " m=" << m << " j=" << j << " l=" << l;
                }
        }
    }
}

TEST(GaussLegendre, OneAndTwoPointRules) {
    auto [x1, w1] = gauss_legendre_nodes(1);
    EXPECT_NEAR(x1[0], 0.0, 1e-15);
    EXPECT_NEAR(w1[0], 2.0, 1e-15);

    auto [x2, w2] = gauss_legendre_nodes(2);
    EXPECT_NEAR(x2[0], -1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(x2[1], 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(w2[0], 1.0, 1e-15);
    EXPECT_NEAR(w2[1], 1.0, 1e-15);
}

TEST(GaussLegendre, QuarticWithThreePoints) {
    auto [x, w] = gauss_legendre_nodes(3);
    double sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) sum += w[i] * std::pow(x[i], 4);
    EXPECT_NEAR(sum, 0.4, 1e-14);
}

TEST(GaussLegendre, ExactForDegreeTwoNMinusOne) {
    Xoshiro256pp rng(31);
    for (int n : {5, 20, 64, 128, 256}) {
        auto [x, w] = gauss_legendre_nodes(n);
        // Random polynomial of degree 2n-1 via its coefficients; the exact
        // integral over [-1,1] is sum over even powers 2 c_k / (k+1).
        const int degree = 2 * n - 1;
        std::vector<double> coeffs(static_cast<size_t>(degree) + 1);
        double exact = 0.0;
        for (int k = 0; k <= degree; ++k) {
            coeffs[static_cast<size_t>(k)] = (2.0 * rng.uniform01() - 1.0) / std::pow(2.0, k / 2);
            if (k % 2 == 0) exact += 2.0 * coeffs[static_cast<size_t>(k)] / (k + 1);
        }
        double sum = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            double value = 0.0;
            for (int k = degree; k >= 0; --k) value = value * x[i] + coeffs[static_cast<size_t>(k)];
            sum += w[i] * value;
        }
        EXPECT_NEAR(sum, exact, 1e-12 * std::max(1.0, std::abs(exact))) << "n=" << n;
    }
}

TEST(GaussLegendre, RejectsOutOfRangeCounts) {
    EXPECT_THROW(gauss_legendre_nodes(0), std::invalid_argument);
    EXPECT_THROW(gauss_legendre_nodes(257), std::invalid_argument);
}
