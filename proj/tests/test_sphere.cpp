#include <gtest/gtest.h>

#include <cmath>

#include "sphanova/sphere.hpp"

using namespace sphanova;

TEST(SurfaceArea, ClosedFormValues) {
    EXPECT_NEAR(surface_area(0), 2.0, 1e-14);
    EXPECT_NEAR(surface_area(1), 2.0 * kPi, 1e-13);
    EXPECT_NEAR(surface_area(2), 4.0 * kPi, 1e-13);
    EXPECT_NEAR(surface_area(3), 2.0 * kPi * kPi, 1e-13);
}

// Independent oracle: omega_d = 2 pi / (d - 1) * omega_{d-2}, seeded with
// the elementary values omega_0 = 2 and omega_1 = 2 pi.
TEST(SurfaceArea, RecurrenceOracleUpToD50) {
    double even = 2.0;       // omega_0
    double odd = 2.0 * kPi;  // omega_1
    for (int d = 2; d <= 50; ++d) {
        double& prev = (d % 2 == 0) ? even : odd;
        prev *= 2.0 * kPi / (d - 1);
        EXPECT_NEAR(surface_area(d) / prev, 1.0, 1e-12) << "d=" << d;
    }
}

TEST(SurfaceArea, RejectsNegativeDimension) {
    EXPECT_THROW(surface_area(-1), std::invalid_argument);
}

TEST(SampleUniform, DeterministicForFixedSeed) {
    const SampleSet a = sample_uniform(SphereDim(5), 500, 42);
    const SampleSet b = sample_uniform(SphereDim(5), 500, 42);
    const SampleSet c = sample_uniform(SphereDim(5), 500, 43);
    EXPECT_EQ((a.points - b.points).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GT((a.points - c.points).cwiseAbs().maxCoeff(), 0.0);
}

TEST(SampleUniform, PointsHaveUnitNorm) {
    const SampleSet set = sample_uniform(SphereDim(7), 2000, 3);
    for (int i = 0; i < set.size(); ++i)
        EXPECT_NEAR(set.points.row(i).norm(), 1.0, 1e-12);
}

TEST(SampleUniform, CoordinateMeansVanish) {
    const int m = 100000;
    const SampleSet set = sample_uniform(SphereDim(2), m, 11);
    const double bound = 3.0 / std::sqrt(static_cast<double>(m));
    for (int j = 0; j < 3; ++j)
        EXPECT_LT(std::abs(set.points.col(j).mean()), bound);
}

TEST(SampleUniform, SecondMomentMatchesOneOverAmbient) {
    const int m = 100000;
    const int d = 10;
    const SampleSet set = sample_uniform(SphereDim(d), m, 5);
    const double bound = 3.0 / std::sqrt(static_cast<double>(m));
    EXPECT_NEAR(set.points.col(0).array().square().mean(), 1.0 / (d + 1), bound);
}

TEST(SampleUniform, CrossMomentsAreDiagonal) {
    const int m = 100000;
    const int d = 4;
    const SampleSet set = sample_uniform(SphereDim(d), m, 17);
    const double bound = 4.0 / std::sqrt(static_cast<double>(m));
    for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j) {
            const double moment = (set.points.col(i).array() * set.points.col(j).array()).mean();
            const double expected = (i == j) ? 1.0 / (d + 1) : 0.0;
            EXPECT_NEAR(moment, expected, bound) << i << "," << j;
        }
}

TEST(Reflect, IdentityInvolutionAndExample) {
    Eigen::VectorXd x(3);
    x << 1.0, 0.0, 0.0;
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
    EXPECT_EQ(reflect(x, ones), x);

    Eigen::VectorXd minus = -ones;
    EXPECT_EQ(reflect(reflect(x, minus), minus), x);

    Eigen::VectorXd k(3);
    k << -1.0, 1.0, 1.0;
    const Eigen::VectorXd y = reflect(x, k);
    EXPECT_DOUBLE_EQ(y[0], -1.0);
    EXPECT_DOUBLE_EQ(y[1], 0.0);
    EXPECT_DOUBLE_EQ(y[2], 0.0);
}

TEST(FiberPoint, ZeroAnchorEmbedsFiberSphere) {
    Eigen::VectorXd y(1);
    y << 0.0;
    Eigen::VectorXd z(2);
    z << 0.6, 0.8;
    const Eigen::VectorXd x = fiber_point(y, z, {1}, 2);
    EXPECT_DOUBLE_EQ(x[0], 0.0);
    EXPECT_DOUBLE_EQ(x[1], 0.6);
    EXPECT_DOUBLE_EQ(x[2], 0.8);
}

TEST(FiberPoint, UnitAnchorZeroesComplement) {
    Eigen::VectorXd y(2);
    y << 0.6, 0.8;
    Eigen::VectorXd z(2);
    z << 1.0, 0.0;
    const Eigen::VectorXd x = fiber_point(y, z, {2, 4}, 3);
    EXPECT_DOUBLE_EQ(x[1], 0.6);
    EXPECT_DOUBLE_EQ(x[3], 0.8);
    EXPECT_DOUBLE_EQ(x[0], 0.0);
    EXPECT_DOUBLE_EQ(x[2], 0.0);
}

TEST(FiberPoint, CircleExample) {
    // d=2, u={1}, y=0.6: the fiber is the circle (0.6, 0.8 cos, 0.8 sin).
    Eigen::VectorXd y(1);
    y << 0.6;
    const double theta = 0.3;
    Eigen::VectorXd z(2);
    z << std::cos(theta), std::sin(theta);
    const Eigen::VectorXd x = fiber_point(y, z, {1}, 2);
    EXPECT_NEAR(x[0], 0.6, 1e-15);
    EXPECT_NEAR(x[1], 0.8 * std::cos(theta), 1e-15);
    EXPECT_NEAR(x[2], 0.8 * std::sin(theta), 1e-15);
    EXPECT_NEAR(x.norm(), 1.0, 1e-12);
}

TEST(FiberPoint, AlwaysUnitNorm) {
    Xoshiro256pp rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + static_cast<int>(rng.next() % 8);
        const int order = 1 + static_cast<int>(rng.next() % (d - 1));
        std::vector<int> u;
        for (int i = 1; i <= d + 1 && static_cast<int>(u.size()) < order; ++i)
            if (rng.uniform01() < 0.5 || (d + 1 - i) == (order - static_cast<int>(u.size())))
                u.push_back(i);
        Eigen::VectorXd y = rng.uniform01() * random_sphere_point(order - 1, rng);
        const Eigen::VectorXd z = random_sphere_point(d - order, rng);
        const Eigen::VectorXd x = fiber_point(y, z, u, d);
        EXPECT_NEAR(x.norm(), 1.0, 1e-12);
    }
}

TEST(FiberPoint, RejectsAnchorOutsideBall) {
    Eigen::VectorXd y(2);
    y << 0.9, 0.9;
    Eigen::VectorXd z(2);
    z << 1.0, 0.0;
    EXPECT_THROW(fiber_point(y, z, {1, 2}, 3), std::domain_error);
}

TEST(SpherePoint, NormalizesAndValidates) {
    Eigen::VectorXd v(3);
    v << 1.0 + 1e-8, 0.0, 0.0;
    const SpherePoint p(v);
    EXPECT_NEAR(p.coords().norm(), 1.0, 1e-15);
    Eigen::VectorXd bad(3);
    bad << 2.0, 0.0, 0.0;
    EXPECT_THROW(SpherePoint{bad}, std::domain_error);
}

TEST(SphereDim, RejectsNonPositive) {
    EXPECT_THROW(SphereDim(0), std::invalid_argument);
}
