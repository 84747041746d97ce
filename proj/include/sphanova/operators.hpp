#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sphanova/index_set.hpp"
#include "sphanova/sphere.hpp"

namespace sphanova {

/// Carrier for the function f: S^d -> R fed to the operators. Evaluation
/// must be deterministic (same point, same value).
struct BlackBoxFunction {
    std::function<double(const Eigen::VectorXd&)> eval;
    int d = 0;

    double operator()(const Eigen::VectorXd& x) const { return eval(x); }
};

/// Monte Carlo configuration for the projection operators. These
/// operators are validation oracles for small d, not a fitting path.
struct QuadSpec {
    int nodes = 200000;
    std::uint64_t seed = 1;
};

/// A Monte Carlo estimate with its standard error.
struct McEstimate {
    double value = 0.0;
    double se = 0.0;
};

/// [Xi_xi f](x) = 2^-(d+1) sum_{k in {-1,1}^{d+1}} (prod_i k_i^{xi_i}) f(k (.) x).
/// Evaluates all 2^(d+1) reflections, hence the dimension cap.
inline double parity_component(const BlackBoxFunction& f, const ParityVector& xi,
                               const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    if (n != f.d + 1 || xi.length() != n)
        throw std::invalid_argument("parity_component: dimension mismatch");
    if (n > 20) throw std::invalid_argument("parity_component: oracle limited to d+1 <= 20");

    const std::uint64_t total = 1ULL << n;
    Eigen::VectorXd flipped(n);
    double sum = 0.0;
    for (std::uint64_t k = 0; k < total; ++k) {
        for (int i = 0; i < n; ++i) flipped[i] = (k >> i) & 1ULL ? -x[i] : x[i];
        const double sign = (__builtin_popcountll(k & xi.bits()) & 1) ? -1.0 : 1.0;
        sum += sign * f(flipped);
    }
    return sum / static_cast<double>(total);
}

/// Restrict a vector anchored on u to a subset v of u.
inline Eigen::VectorXd restrict_anchor(const Eigen::VectorXd& y_u, const IndexSet& u,
                                       const IndexSet& v) {
    Eigen::VectorXd y_v(v.order());
    int out = 0;
    for (size_t j = 0; j < u.members().size(); ++j)
        if (v.contains(u.members()[j])) y_v[out++] = y_u[static_cast<Eigen::Index>(j)];
    if (out != v.order()) throw std::invalid_argument("restrict_anchor: v is not a subset of u");
    return y_v;
}

/// Fiber mean [P_u f](y_u): the average of f over the sub-sphere
/// {x in S^d : x_u = y_u}, estimated by Monte Carlo on S^{|u^c|-1}.
/// For u = {} this is the global mean over S^d. The one-point-fiber case
/// |u^c| = 1 averages the two points of S^0.
inline McEstimate project(const BlackBoxFunction& f, const IndexSet& u,
                          const Eigen::VectorXd& y_u, const QuadSpec& quad) {
    const int d = f.d;
    if (u.ambient() != d + 1) throw std::invalid_argument("project: ambient mismatch");
    if (u.order() == d) throw std::invalid_argument("project: P_u undefined for |u| = d");
    if (u.order() == d + 1) throw std::invalid_argument("project: u must be a proper subset");
    if (y_u.size() != u.order()) throw std::invalid_argument("project: |y_u| != |u|");
    if (y_u.squaredNorm() > 1.0 + 1e-12) throw std::domain_error("project: |y_u| > 1");

    const int fiber_coords = d + 1 - u.order();
    const std::vector<int>& members = u.members();

    if (fiber_coords == 1) {
        Eigen::VectorXd z(1);
        z[0] = 1.0;
        const double a = f(fiber_point(y_u, z, members, d));
        z[0] = -1.0;
        const double b = f(fiber_point(y_u, z, members, d));
        return {0.5 * (a + b), 0.0};
    }

    Xoshiro256pp rng(derive_seed(quad.seed, 0x50524fULL ^ u.mask()));
    double sum = 0.0, sum_sq = 0.0;
    for (int j = 0; j < quad.nodes; ++j) {
        const Eigen::VectorXd z = random_sphere_point(fiber_coords - 1, rng);
        const double v = f(fiber_point(y_u, z, members, d));
        sum += v;
        sum_sq += v * v;
    }
    const double n = quad.nodes;
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

/// [A_u f](y_u) by the Moebius sum over subsets,
///   A_u f = sum_{v subseteq u} (-1)^{|u|-|v|} P_v f.
/// Each P_v draws from a substream keyed by v, so the recursive and
/// Moebius evaluations combine identical projection estimates.
inline McEstimate anova_operator(const BlackBoxFunction& f, const IndexSet& u,
                                 const Eigen::VectorXd& y_u, const QuadSpec& quad) {
    if (u.order() > f.d - 1 && u.order() != 0)
        throw std::invalid_argument("anova_operator: |u| <= d-1 required");
    double value = 0.0, var = 0.0;
    for (const IndexSet& v : u.subsets()) {
        const McEstimate p = project(f, v, restrict_anchor(y_u, u, v), quad);
        const double sign = ((u.order() - v.order()) & 1) ? -1.0 : 1.0;
        value += sign * p.value;
        var += p.se * p.se;
    }
    return {value, std::sqrt(var)};
}

/// [A_u f](y_u) by the recursive definition
///   A_u f = P_u f - sum_{v strictly inside u} A_v f.
/// Used only to cross-check the Moebius form.
inline double anova_operator_recursive(const BlackBoxFunction& f, const IndexSet& u,
                                       const Eigen::VectorXd& y_u, const QuadSpec& quad) {
    double value = project(f, u, y_u, quad).value;
    for (const IndexSet& v : u.subsets()) {
        if (v == u) continue;
        value -= anova_operator_recursive(f, v, restrict_anchor(y_u, u, v), quad);
    }
    return value;
}

/// Both routes at once; the test harness asserts agreement.
inline std::pair<double, double> iterative_vs_moebius(const BlackBoxFunction& f, const IndexSet& u,
                                                      const Eigen::VectorXd& y_u,
                                                      const QuadSpec& quad) {
    return {anova_operator_recursive(f, u, y_u, quad), anova_operator(f, u, y_u, quad).value};
}

/// Volume of the unit ball B^n.
inline double ball_volume(int n) {
    return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Uniform draw inside B^n by rejection from the enclosing cube.
inline Eigen::VectorXd random_ball_point(int n, Xoshiro256pp& rng) {
    Eigen::VectorXd x(n);
    do {
        for (int i = 0; i < n; ++i) x[i] = 2.0 * rng.uniform01() - 1.0;
    } while (x.squaredNorm() > 1.0);
    return x;
}

struct IntegralConditionEntry {
    int condition = 1;   // 1 or 2, matching the two families of conditions
    IndexSet a;          // proper subset of u fixed by the anchor
    int m = 0;           // weight exponent (condition 2 only)
    double anchor_r = 0; // radius parameter (condition 2 only)
    double value = 0.0;
    double se = 0.0;
    bool flagged = false; // singular weight with untrustworthy SE
};

struct IntegralConditionReport {
    std::vector<IntegralConditionEntry> entries;
    double max_abs_value = 0.0; // over unflagged entries
    double se_at_max = 0.0;
    double max_t = 0.0; // max |value| / se over unflagged entries
    int flagged_count = 0;
};

/// Checks the vanishing-integral conditions that characterize admissible
/// ANOVA terms, at `trials` random anchors (a, y_a, r). The function g
/// lives on B^{|u|}. Entries with singular weight (m = -1) whose standard
/// error exceeds `flag_se_tol` are flagged rather than failed.
inline IntegralConditionReport check_integral_conditions(
    const std::function<double(const Eigen::VectorXd&)>& g, const IndexSet& u, int d, int trials,
    const QuadSpec& quad, double flag_se_tol = 0.05) {
    if (u.order() < 1 || u.order() > d - 1)
        throw std::invalid_argument("check_integral_conditions: 1 <= |u| <= d-1 required");

    const int n_u = u.order();
    Xoshiro256pp anchor_rng(derive_seed(quad.seed, 0x494eu));
    IntegralConditionReport report;

    // Positions (within u) belonging to a, for assembling g's argument.
    auto assemble = [&](const std::vector<int>& a_pos, const Eigen::VectorXd& y_a, double scale,
                        const Eigen::VectorXd& x_rest) {
        Eigen::VectorXd arg(n_u);
        std::vector<char> is_a(static_cast<size_t>(n_u), 0);
        for (size_t j = 0; j < a_pos.size(); ++j) {
            arg[a_pos[j]] = y_a[static_cast<Eigen::Index>(j)];
            is_a[static_cast<size_t>(a_pos[j])] = 1;
        }
        int r = 0;
        for (int j = 0; j < n_u; ++j)
            if (!is_a[static_cast<size_t>(j)]) arg[j] = scale * x_rest[r++];
        return arg;
    };

    for (int t = 0; t < trials; ++t) {
        // a: uniform over proper subsets of u (the empty set included).
        const std::uint64_t a_bits = anchor_rng.next() % ((1ULL << n_u) - 1);
        std::vector<int> a_members, a_pos;
        for (int j = 0; j < n_u; ++j)
            if (a_bits & (1ULL << j)) {
                a_members.push_back(u.members()[static_cast<size_t>(j)]);
                a_pos.push_back(j);
            }
        const IndexSet a(a_members, u.ambient());
        const int n_rest = n_u - a.order();

        Eigen::VectorXd y_a = a.order() ? random_ball_point(a.order(), anchor_rng)
                                        : Eigen::VectorXd(0);
        const double slack = std::sqrt(std::max(0.0, 1.0 - y_a.squaredNorm()));
        const double r_anchor = slack * anchor_rng.uniform01();

        Xoshiro256pp mc_rng(derive_seed(quad.seed, 0x4d43u ^ (a_bits << 8) ^ static_cast<std::uint64_t>(t)));
        const double volume = ball_volume(n_rest);

        auto estimate = [&](double scale, double weight_half_power, double prefactor) {
            double sum = 0.0, sum_sq = 0.0;
            for (int j = 0; j < quad.nodes; ++j) {
                const Eigen::VectorXd x = random_ball_point(n_rest, mc_rng);
                const double w = std::pow(std::max(1e-300, 1.0 - x.squaredNorm()),
                                          0.5 * weight_half_power);
                const double v = w * g(assemble(a_pos, y_a, scale, x));
                sum += v;
                sum_sq += v * v;
            }
            const double nn = quad.nodes;
            const double mean = sum / nn;
            const double var = std::max(0.0, sum_sq / nn - mean * mean);
            return McEstimate{prefactor * volume * mean,
                              prefactor * volume * std::sqrt(var / nn)};
        };

        {
            IntegralConditionEntry e;
            e.condition = 1;
            e.a = a;
            const McEstimate est = estimate(slack, d - u.order() - 1, 1.0);
            e.value = est.value;
            e.se = est.se;
            report.entries.push_back(e);
        }
        const double scale2 = std::sqrt(std::max(0.0, slack * slack - r_anchor * r_anchor));
        for (int m = -1; m <= d - n_u - 2; ++m) {
            IntegralConditionEntry e;
            e.condition = 2;
            e.a = a;
            e.m = m;
            e.anchor_r = r_anchor;
            const McEstimate est = estimate(scale2, m, scale2);
            e.value = est.value;
            e.se = est.se;
            e.flagged = (m == -1) && (est.se > flag_se_tol);
            report.entries.push_back(e);
        }
    }

    for (const auto& e : report.entries) {
        if (e.flagged) {
            ++report.flagged_count;
            continue;
        }
        if (std::abs(e.value) > report.max_abs_value) {
            report.max_abs_value = std::abs(e.value);
            report.se_at_max = e.se;
        }
        const double t = e.se > 0.0 ? std::abs(e.value) / e.se
                                    : (e.value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        report.max_t = std::max(report.max_t, t);
    }
    return report;
}

} // namespace sphanova
