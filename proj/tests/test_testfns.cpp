#include <gtest/gtest.h>

#include <cmath>

#include "sphanova/operators.hpp"
#include "sphanova/testfns.hpp"

using namespace sphanova;

TEST(TestFunctions, FormulasAtLiteralPoints) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(11);
    x << 0.1, -0.4, 0.2, 0.5, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, std::sqrt(1.0 - 0.55);
    const double fa = test_function("A").eval(x);
    EXPECT_NEAR(fa, 0.1 * std::pow(-0.4, 3) + 2.0 * 0.2 * std::pow(0.5, 5) + 0.05 * 0.3, 1e-15);

    const double fc = test_function("C").eval(x);
    EXPECT_NEAR(fc, std::pow(0.1, 4) + 0.16, 1e-15);

    const double fe = test_function("E").eval(x);
    EXPECT_NEAR(fe,
                std::sin(0.1) + 7.0 * std::sin(-0.4) * std::sin(-0.4) +
                    0.1 * std::pow(0.2, 4) * std::sin(0.1),
                1e-15);

    const double fd = test_function("D").eval(x);
    EXPECT_NEAR(fd,
                5.0 * 0.1 * 0.16 + 0.5 + std::exp(0.2) +
                    10.0 * std::sin(3.0 * kPi * 0.3) * std::pow(-0.4, 4),
                1e-12);

    EXPECT_NEAR(test_function("F").eval(x), 0.01 * 0.16 * 0.04, 1e-15);
    EXPECT_NEAR(test_function("B").eval(x), -0.4 * 0.01, 1e-15);
}

TEST(TestFunctions, UnknownNameRejected) {
    EXPECT_THROW(test_function("G"), std::invalid_argument);
}

TEST(TestFunctions, SupportMetadata) {
    const auto fa = test_function("A");
    EXPECT_TRUE(fa.in_span_q2);
    EXPECT_EQ(fa.expected_support.size(), 3u);

    const auto fd = test_function("D");
    EXPECT_FALSE(fd.in_span_q2);
    // Seven non-zero terms over six index sets, including the {1} and {5}
    // pieces split off the mixed summands.
    EXPECT_EQ(fd.expected_support.size(), 6u);
    EXPECT_NE(std::find(fd.expected_support.begin(), fd.expected_support.end(), IndexSet({1}, 11)),
              fd.expected_support.end());
    EXPECT_NE(std::find(fd.expected_support.begin(), fd.expected_support.end(), IndexSet({5}, 11)),
              fd.expected_support.end());
}

TEST(AnalyticTerms, SumReproducesFunctionPointwise) {
    const int d = 10;
    Xoshiro256pp rng(3);
    for (const std::string name : {"A", "B", "C"}) {
        const NamedTestFunction f = test_function(name, d);
        const auto terms = analytic_terms(name, d);
        for (int trial = 0; trial < 1000; ++trial) {
            const Eigen::VectorXd x = random_sphere_point(d, rng);
            double sum = 0.0;
            for (const auto& term : terms) {
                Eigen::VectorXd y(term.term.u.order());
                for (int i = 0; i < term.term.u.order(); ++i)
                    y[i] = x[term.term.u.members()[static_cast<size_t>(i)] - 1];
                sum += term.closed_form(y);
            }
            ASSERT_NEAR(sum, f.eval(x), 1e-12) << name;
        }
    }
}

TEST(AnalyticTerms, HaveDeclaredParity) {
    const int d = 10;
    Xoshiro256pp rng(5);
    for (const std::string name : {"A", "B", "C"}) {
        for (const auto& term : analytic_terms(name, d)) {
            const int n = term.term.u.order();
            if (n == 0) continue;
            for (int trial = 0; trial < 50; ++trial) {
                Eigen::VectorXd y = 0.9 * rng.uniform01() * random_sphere_point(n - 1, rng);
                for (std::uint64_t pattern = 1; pattern < (1ULL << n); ++pattern) {
                    Eigen::VectorXd flipped = y;
                    double sign = 1.0;
                    for (int i = 0; i < n; ++i) {
                        if (!((pattern >> i) & 1ULL)) continue;
                        flipped[i] = -flipped[i];
                        if (term.term.xi.odd_in(term.term.u.members()[static_cast<size_t>(i)]))
                            sign = -sign;
                    }
                    ASSERT_NEAR(term.closed_form(flipped), sign * term.closed_form(y), 1e-12);
                }
            }
        }
    }
}

TEST(AnalyticTerms, ConstantTermOfFc) {
    // E[x1^4] + E[x2^2] = 3/143 + 13/143 at d = 10.
    const auto terms = analytic_terms("C", 10);
    Eigen::VectorXd empty(0);
    EXPECT_NEAR(terms[0].closed_form(empty), 16.0 / 143.0, 1e-15);
}

TEST(AnalyticTerms, FbOneDimensionalTermValue) {
    const auto terms = analytic_terms("B", 10);
    Eigen::VectorXd y(1);
    y << 0.5;
    EXPECT_NEAR(terms[0].closed_form(y), 0.05 - 0.0125, 1e-15);
}

TEST(AnalyticTerms, OnlyClosedFormFunctionsSupported) {
    EXPECT_THROW(analytic_terms("D", 10), std::invalid_argument);
    EXPECT_THROW(analytic_terms("E", 10), std::invalid_argument);
    EXPECT_THROW(analytic_terms("F", 10), std::invalid_argument);
}

TEST(OracleVariance, ZeroTermHasZeroVariance) {
    AnalyticTerm zero{TermIndex{IndexSet({3}, 11), ParityVector::unit(3, 11)},
                      [](const Eigen::VectorXd&) { return 0.0; }};
    EXPECT_EQ(oracle_term_variance(zero, 10), 0.0);
}

TEST(OracleVariance, LinearTermMatchesMomentIdentity) {
    // Var(0.05 x5) = 0.0025 / (d+1) from E[x_i^2] = 1/(d+1).
    const int d = 10;
    const auto terms = analytic_terms("A", d);
    const AnalyticTerm& t5 = terms[3];
    ASSERT_EQ(t5.term.u, IndexSet({5}, d + 1));
    EXPECT_NEAR(oracle_term_variance(t5, d), 0.0025 / (d + 1.0), 1e-14);
}

TEST(OracleVariance, FcSquareTermClosedForm) {
    // E[(x2^2 - 1/11)^2] = 3/143 - 1/121 at d = 10.
    const int d = 10;
    const auto terms = analytic_terms("C", d);
    const AnalyticTerm& t2 = terms[2];
    const double expected = 3.0 / 143.0 - 1.0 / 121.0;
    EXPECT_NEAR(oracle_term_variance(t2, d), expected, 1e-13);
}

TEST(OracleVariance, TwoDimensionalTermMatchesMonteCarlo) {
    const int d = 10;
    const auto terms = analytic_terms("B", d);
    const AnalyticTerm& pair_term = terms[1];
    ASSERT_EQ(pair_term.term.u.order(), 2);
    const double oracle = oracle_term_variance(pair_term, d);

    const SampleSet samples = sample_uniform(SphereDim(d), 1000000, 41);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < samples.size(); ++i) {
        Eigen::VectorXd y(2);
        y << samples.points(i, 0), samples.points(i, 1);
        const double v = pair_term.closed_form(y);
        const double v2 = v * v;
        sum += v2;
        sum_sq += v2 * v2;
    }
    const double n = samples.size();
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
    EXPECT_NEAR(mean, oracle, 4.0 * se);
}

TEST(OracleVariance, OneDimensionalTermMatchesMonteCarlo) {
    const int d = 10;
    const auto terms = analytic_terms("B", d);
    const AnalyticTerm& t2 = terms[0];
    const double oracle = oracle_term_variance(t2, d);
    const SampleSet samples = sample_uniform(SphereDim(d), 1000000, 43);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < samples.size(); ++i) {
        Eigen::VectorXd y(1);
        y << samples.points(i, 1);
        const double v2 = std::pow(t2.closed_form(y), 2);
        sum += v2;
        sum_sq += v2 * v2;
    }
    const double n = samples.size();
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
    EXPECT_NEAR(mean, oracle, 4.0 * se);
}

TEST(OracleVariance, RejectsHigherOrders) {
    AnalyticTerm triple{TermIndex{IndexSet({1, 2, 3}, 11), ParityVector(0b111, 11)},
                        [](const Eigen::VectorXd&) { return 1.0; }};
    EXPECT_THROW(oracle_term_variance(triple, 10), std::invalid_argument);
}
