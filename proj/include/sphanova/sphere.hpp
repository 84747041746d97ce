#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sphanova/constants.hpp"
#include "sphanova/rng.hpp"

namespace sphanova {

/// Dimension of the sphere S^d; the ambient space is R^{d+1}.
struct SphereDim {
    int d;

    explicit SphereDim(int dim) : d(dim) {
        if (dim < 1) throw std::invalid_argument("SphereDim: d must be >= 1");
    }
    int ambient() const { return d + 1; }
};

/// Surface area of S^d under the measure normalization
/// omega_d = 2 pi^((d+1)/2) / Gamma((d+1)/2). The closed form already
/// yields omega_0 = 2, the counting measure on S^0 = {-1, 1}.
inline double surface_area(int d) {
    if (d < 0) throw std::invalid_argument("surface_area: d must be >= 0");
    const double half = 0.5 * (d + 1);
    return 2.0 * std::pow(kPi, half) / std::tgamma(half);
}

/// A point on S^d. Construction normalizes; inputs further than 1e-6 from
/// the sphere are rejected as errors rather than silently rescaled.
class SpherePoint {
  public:
    explicit SpherePoint(Eigen::VectorXd coords, double tol = 1e-6)
        : coords_(std::move(coords)) {
        const double norm = coords_.norm();
        if (norm == 0.0 || std::abs(norm - 1.0) > tol)
            throw std::domain_error("SpherePoint: input is not on the unit sphere");
        coords_ /= norm;
    }

    const Eigen::VectorXd& coords() const { return coords_; }
    double operator[](int i) const { return coords_[i]; }
    int ambient_dim() const { return static_cast<int>(coords_.size()); }

  private:
    Eigen::VectorXd coords_;
};

/// Sampling nodes on S^d with (optional) function values. Points are the
/// rows of an M x (d+1) matrix; the seed that produced them is kept for
/// reproducibility.
struct SampleSet {
    Eigen::MatrixXd points; // M x (d+1), each row unit norm
    Eigen::VectorXd values; // length M (may be empty until filled)
    std::uint64_t seed = 0;
    int d = 0;

    int size() const { return static_cast<int>(points.rows()); }

    SpherePoint point(int i) const { return SpherePoint(points.row(i).transpose(), 1e-9); }

    template <typename F>
    void fill_values(F&& f) {
        values.resize(points.rows());
        for (int i = 0; i < points.rows(); ++i)
            values[i] = f(points.row(i).transpose());
    }
};

/// Draw a single uniform point on S^d (Gaussian normalization).
inline Eigen::VectorXd random_sphere_point(int d, Xoshiro256pp& rng) {
    Eigen::VectorXd x(d + 1);
    double norm2 = 0.0;
    do {
        for (int j = 0; j <= d; ++j) x[j] = rng.normal();
        norm2 = x.squaredNorm();
    } while (norm2 < 1e-24); // probability-zero degenerate draw
    return x / std::sqrt(norm2);
}

/// m i.i.d. uniform points on S^d; deterministic for a fixed seed.
inline SampleSet sample_uniform(SphereDim dim, int m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("sample_uniform: m must be >= 1");
    Xoshiro256pp rng(derive_seed(seed, 0x5348u));
    SampleSet set;
    set.d = dim.d;
    set.seed = seed;
    set.points.resize(m, dim.ambient());
    for (int i = 0; i < m; ++i)
        set.points.row(i) = random_sphere_point(dim.d, rng).transpose();
    return set;
}

/// Componentwise sign flip k (.) x for k in {-1, 1}^{d+1}.
inline Eigen::VectorXd reflect(const Eigen::VectorXd& x, const Eigen::VectorXd& signs) {
    if (signs.size() != x.size())
        throw std::invalid_argument("reflect: sign vector has wrong length");
    return x.cwiseProduct(signs);
}

inline SpherePoint reflect(const SpherePoint& x, const Eigen::VectorXd& signs) {
    return SpherePoint(reflect(x.coords(), signs), 1e-9);
}

/// Assemble the ambient point with coordinates y_u in the slots listed by
/// `u` (1-based, sorted) and sqrt(1-|y_u|^2) * z in the complement slots.
/// This parameterizes the fiber {x in S^d : x_u = y_u}.
inline Eigen::VectorXd fiber_point(const Eigen::VectorXd& y_u, const Eigen::VectorXd& z,
                                   const std::vector<int>& u, int d) {
    const int ambient = d + 1;
    if (static_cast<int>(u.size()) != y_u.size())
        throw std::invalid_argument("fiber_point: |u| != |y_u|");
    if (static_cast<int>(u.size()) + z.size() != ambient)
        throw std::invalid_argument("fiber_point: |u| + |z| != d+1");
    const double y_norm2 = y_u.squaredNorm();
    if (y_norm2 > 1.0 + 1e-12) throw std::domain_error("fiber_point: |y_u| > 1");
    const double radius = std::sqrt(std::max(0.0, 1.0 - y_norm2));

    Eigen::VectorXd x(ambient);
    std::vector<char> in_u(static_cast<size_t>(ambient) + 1, 0);
    for (size_t j = 0; j < u.size(); ++j) {
        x[u[j] - 1] = y_u[static_cast<Eigen::Index>(j)];
        in_u[static_cast<size_t>(u[j])] = 1;
    }
    int zi = 0;
    for (int i = 1; i <= ambient; ++i)
        if (!in_u[static_cast<size_t>(i)]) x[i - 1] = radius * z[zi++];
    return x;
}

} // namespace sphanova
