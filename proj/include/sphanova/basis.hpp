#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphanova/index_set.hpp"
#include "sphanova/orthopoly.hpp"
#include "sphanova/rng.hpp"
#include "sphanova/sphere.hpp"

namespace sphanova {

/// One (u, xi) pair of the decomposition: which variables a term depends
/// on and with which parity pattern.
struct TermIndex {
    IndexSet u;
    ParityVector xi;

    friend bool operator==(const TermIndex& a, const TermIndex& b) {
        return a.u == b.u && a.xi == b.xi;
    }
    friend bool operator<(const TermIndex& a, const TermIndex& b) {
        if (a.u != b.u) return a.u < b.u;
        return a.xi < b.xi;
    }
    std::string to_string() const { return u.to_string() + ":" + xi.to_string(); }
};

/// Number of admissible (u, xi) pairs including the full remainder term,
/// counted by brute force. Without the redundancy omission this equals
/// 3^{d+1} - 2^d (d+1); with it, 2*3^d - 2^{d-1} (d+2).
inline std::int64_t count_decomposition_terms(int d, bool with_omission) {
    if (d < 2 || d > 18)
        throw std::invalid_argument("count_decomposition_terms: brute force covers 2 <= d <= 18");
    const int ambient = d + 1;
    std::int64_t count = 0;
    for (std::uint64_t u_bits = 0; u_bits < (1ULL << ambient); ++u_bits) {
        const int order = __builtin_popcountll(u_bits);
        if (order == d) continue; // |u| = d excluded from the decomposition
        // Enumerate xi over the submasks of u (xi supported in u).
        std::uint64_t xi_bits = u_bits;
        while (true) {
            bool keep = true;
            if (with_omission) {
                const bool touches_last = (u_bits >> d) & 1ULL;
                const bool odd_in_last = (xi_bits >> d) & 1ULL;
                keep = !(touches_last && !odd_in_last);
            }
            if (keep) ++count;
            if (xi_bits == 0) break;
            xi_bits = (xi_bits - 1) & u_bits;
        }
    }
    return count;
}

/// All fit terms of order <= q: the constant plus every (u, xi) with
/// 1 <= |u| <= q, xi supported in u, skipping terms that depend evenly on
/// x_{d+1} (redundant through x_{d+1}^2 = 1 - sum_{i<=d} x_i^2).
/// Deterministic order: (|u|, u, xi).
inline std::vector<TermIndex> enumerate_terms(SphereDim dim, int q) {
    const int d = dim.d;
    if (q < 0 || q > d - 1) throw std::invalid_argument("enumerate_terms: 0 <= q <= d-1 required");
    const int ambient = d + 1;

    std::vector<TermIndex> terms;
    terms.push_back({IndexSet::empty(ambient), ParityVector::zero(ambient)});
    std::vector<IndexSet> sets;
    // q <= 2 in practice; build the subsets directly instead of scanning
    // all 2^(d+1) masks so large d stays cheap.
    for (int i = 1; i <= ambient && q >= 1; ++i) sets.push_back(IndexSet({i}, ambient));
    if (q >= 2)
        for (int i = 1; i <= ambient; ++i)
            for (int j = i + 1; j <= ambient; ++j) sets.push_back(IndexSet({i, j}, ambient));
    if (q >= 3) {
        if (ambient > 24)
            throw std::invalid_argument("enumerate_terms: q >= 3 enumeration limited to d <= 23");
        for (std::uint64_t u_bits = 1; u_bits < (1ULL << ambient); ++u_bits) {
            const int order = __builtin_popcountll(u_bits);
            if (order >= 3 && order <= q) sets.push_back(IndexSet::from_mask(u_bits, ambient));
        }
    }
    std::sort(sets.begin(), sets.end());
    for (const IndexSet& u : sets) {
        std::vector<ParityVector> parities;
        std::uint64_t xi_bits = u.mask();
        while (true) {
            if (!(u.contains(ambient) && !((xi_bits >> d) & 1ULL)))
                parities.emplace_back(xi_bits, ambient);
            if (xi_bits == 0) break;
            xi_bits = (xi_bits - 1) & u.mask();
        }
        std::sort(parities.begin(), parities.end());
        for (const ParityVector& xi : parities) terms.push_back({u, xi});
    }
    return terms;
}

enum class BasisKind { constant, gegenbauer1d, disk2d };
enum class AngularType { cosine, sine };

/// Real/imaginary part of (a + i b)^m, computed by repeated complex
/// multiplication in Cartesian form. This is r^m cos(m theta) resp.
/// r^m sin(m theta) without any trigonometric call, so the angular part
/// is exact at r = 0 and has no branch ambiguity.
inline double angular_harmonic(double a, double b, int m, AngularType type) {
    double re = 1.0, im = 0.0;
    for (int i = 0; i < m; ++i) {
        const double re_next = re * a - im * b;
        im = re * b + im * a;
        re = re_next;
    }
    return type == AngularType::cosine ? re : im;
}

/// One element of a reduced basis B_{u,xi}. `norm_constant` rescales the
/// raw polynomial so its second moment under the uniform sphere measure
/// is one; the design matrix uses the rescaled value.
struct BasisFunction {
    TermIndex term;
    BasisKind kind = BasisKind::constant;
    int degree_k = 0;                        // 1-D Gegenbauer degree
    int total_degree = 0;                    // total polynomial degree N
    int radial_j = 0;                        // 2-D radial Jacobi index
    AngularType angular = AngularType::cosine; // 2-D angular type
    int axis1 = 0, axis2 = 0;                // ambient coordinates, axis1 < axis2
    double norm_constant = 1.0;

    int angular_order() const { return total_degree - 2 * radial_j; }

    /// Unnormalized value: classical Gegenbauer for 1-D functions,
    /// Jacobi(2r^2-1) times the Cartesian harmonic for 2-D functions.
    double raw_eval(const Eigen::VectorXd& x, int d) const {
        switch (kind) {
            case BasisKind::constant:
                return 1.0;
            case BasisKind::gegenbauer1d:
                return gegenbauer(degree_k, GegenbauerParam(0.5 * (d - 1)), x[axis1 - 1]);
            case BasisKind::disk2d: {
                const double a = x[axis1 - 1], b = x[axis2 - 1];
                const double r2 = a * a + b * b;
                const int m = angular_order();
                const double radial =
                    jacobi(radial_j, JacobiParam(0.5 * (d - 3), static_cast<double>(m)),
                           std::min(1.0, 2.0 * r2 - 1.0));
                return radial * angular_harmonic(a, b, m, angular);
            }
        }
        return 0.0;
    }

    double eval(const Eigen::VectorXd& x, int d) const { return raw_eval(x, d) / norm_constant; }
};

/// Parity pattern of a disk function on its two local axes, read off the
/// Cartesian expansion: cosine harmonics are even in the second axis and
/// follow the parity of m in the first; sine harmonics are odd in the
/// second axis and follow m-1 in the first.
inline std::pair<int, int> disk_local_parity(int m, AngularType type) {
    if (type == AngularType::cosine) return {m & 1, 0};
    return {(m - 1) & 1, 1};
}

/// Keep/omit rule for the two-dimensional basis, by total degree N,
/// radial index j and angular type. Degrees 0 and 1 duplicate constant
/// and one-dimensional terms; for even N the radial-only and
/// cos(2 theta) functions reduce to one-dimensional polynomials through
/// x1^2 + x2^2, and for odd N the frequency-one functions do.
inline bool disk_function_kept(int degree_n, int j, AngularType type) {
    const int m = degree_n - 2 * j;
    if (m < 0 || j < 0) return false;
    if (type == AngularType::sine && m == 0) return false; // identically zero
    if (degree_n <= 1) return false;
    if (degree_n == 2) return type == AngularType::sine; // x1 x2 only
    if (degree_n % 2 == 1) return m >= 3;
    return type == AngularType::cosine ? m >= 4 : m >= 2;
}

/// The reduced basis catalog for all terms up to order q with total
/// degree at most N_max. Immutable after construction; functions are
/// grouped by term in the deterministic term order.
class BasisCatalog {
  public:
    BasisCatalog(SphereDim dim, int q, int n_max) : d_(dim.d), q_(q), n_max_(n_max) {
        if (q < 0 || q > 2)
            throw std::invalid_argument("BasisCatalog: only orders q <= 2 are constructed");
        if (q > d_ - 1) throw std::invalid_argument("BasisCatalog: q <= d-1 required");
        if (n_max < 2) throw std::invalid_argument("BasisCatalog: N_max >= 2 required");

        terms_ = enumerate_terms(dim, q);
        term_begin_.assign(terms_.size() + 1, 0);
        for (size_t t = 0; t < terms_.size(); ++t) {
            term_begin_[t] = static_cast<int>(functions_.size());
            append_functions(terms_[t]);
        }
        term_begin_[terms_.size()] = static_cast<int>(functions_.size());
        compute_normalization();
    }

    int d() const { return d_; }
    int max_order() const { return q_; }
    int max_degree() const { return n_max_; }
    int size() const { return static_cast<int>(functions_.size()); }
    const std::vector<BasisFunction>& functions() const { return functions_; }
    const BasisFunction& function(int i) const { return functions_[static_cast<size_t>(i)]; }
    const std::vector<TermIndex>& terms() const { return terms_; }

    int term_count() const { return static_cast<int>(terms_.size()); }
    int term_begin(int t) const { return term_begin_[static_cast<size_t>(t)]; }
    int term_end(int t) const { return term_begin_[static_cast<size_t>(t) + 1]; }

    int find_term(const TermIndex& term) const {
        for (size_t t = 0; t < terms_.size(); ++t)
            if (terms_[t] == term) return static_cast<int>(t);
        return -1;
    }

    double evaluate(int i, const Eigen::VectorXd& x) const {
        return functions_[static_cast<size_t>(i)].eval(x, d_);
    }

    nlohmann::json to_json() const;
    static BasisCatalog from_json(const nlohmann::json& j);

  private:
    BasisCatalog() = default;

    void append_functions(const TermIndex& term) {
        const int order = term.u.order();
        if (order == 0) {
            BasisFunction f;
            f.term = term;
            f.kind = BasisKind::constant;
            functions_.push_back(f);
            return;
        }
        if (order == 1) {
            const int axis = term.u.members()[0];
            const bool odd = term.xi.odd_in(axis);
            // Odd terms use odd Gegenbauer degrees; even terms start at
            // k = 2 because the constant coefficient is zero.
            //
            // The last coordinate needs one more omission once pair terms
            // exist: on the sphere, x_{d+1} = (1 + d/3) x_{d+1}^3
            // + (1/3) sum_i Im((x_i + i x_{d+1})^3), and the right-hand
            // side consists entirely of kept N = 3 pair functions, so the
            // odd x_{d+1} family beyond degree one is redundant (the
            // analogue of the even-dependence omission). Degree one is
            // kept; the higher odd degrees remain representable through
            // the {i, d+1} pairs.
            const int k_max = (axis == d_ + 1 && q_ >= 2) ? 1 : n_max_;
            for (int k = odd ? 1 : 2; k <= k_max; k += 2) {
                BasisFunction f;
                f.term = term;
                f.kind = BasisKind::gegenbauer1d;
                f.degree_k = k;
                f.total_degree = k;
                f.axis1 = axis;
                functions_.push_back(f);
            }
            return;
        }
        // order == 2
        const int i1 = term.u.members()[0];
        const int i2 = term.u.members()[1];
        const int want1 = term.xi.odd_in(i1) ? 1 : 0;
        const int want2 = term.xi.odd_in(i2) ? 1 : 0;
        for (int n = 2; n <= n_max_; ++n) {
            for (AngularType type : {AngularType::cosine, AngularType::sine}) {
                for (int j = 0; 2 * j <= n; ++j) {
                    if (!disk_function_kept(n, j, type)) continue;
                    const auto [p1, p2] = disk_local_parity(n - 2 * j, type);
                    if (p1 != want1 || p2 != want2) continue;
                    BasisFunction f;
                    f.term = term;
                    f.kind = BasisKind::disk2d;
                    f.total_degree = n;
                    f.radial_j = j;
                    f.angular = type;
                    f.axis1 = i1;
                    f.axis2 = i2;
                    functions_.push_back(f);
                }
            }
        }
    }

    /// Second moments under mu_d by fixed quadrature: the weight for a
    /// function of x_u is proportional to sqrt(1-|x_u|^2)^(d-1-|u|).
    void compute_normalization() {
        const double omega_d = surface_area(d_);
        for (BasisFunction& f : functions_) {
            if (f.kind == BasisKind::constant) {
                f.norm_constant = 1.0;
                continue;
            }
            if (f.kind == BasisKind::gegenbauer1d) {
                const GegenbauerParam p(0.5 * (d_ - 1));
                const int k = f.degree_k;
                const double second_moment =
                    surface_area(d_ - 1) / omega_d *
                    integrate_with_sphere_weight(
                        [&](double x) { const double c = gegenbauer(k, p, x); return c * c; },
                        d_ - 2);
                f.norm_constant = std::sqrt(second_moment);
                continue;
            }
            const int m = f.angular_order();
            const JacobiParam p(0.5 * (d_ - 3), static_cast<double>(m));
            const int j = f.radial_j;
            const double angular_factor = (m == 0) ? kTwoPi : kPi;
            const double second_moment =
                surface_area(d_ - 2) / omega_d * angular_factor *
                integrate_radial_weight(
                    [&](double r) {
                        const double v = jacobi(j, p, 2.0 * r * r - 1.0);
                        return v * v;
                    },
                    d_ - 3, 2 * m + 1);
            f.norm_constant = std::sqrt(second_moment);
        }
    }

    int d_ = 0, q_ = 0, n_max_ = 0;
    std::vector<TermIndex> terms_;
    std::vector<BasisFunction> functions_;
    std::vector<int> term_begin_;

    friend BasisCatalog make_unpruned_catalog(SphereDim, int, int);
};

/// Sign-flip check of the parity metadata: for `samples` random points
/// and every sign pattern on the function's axes, evaluation at the
/// flipped point must equal the signed original within 1e-10.
inline bool verify_parity(const BasisFunction& f, int d, int samples, std::uint64_t seed = 7) {
    Xoshiro256pp rng(derive_seed(seed, 0x5041u));
    std::vector<int> axes;
    if (f.kind == BasisKind::gegenbauer1d) axes = {f.axis1};
    if (f.kind == BasisKind::disk2d) axes = {f.axis1, f.axis2};

    for (int s = 0; s < samples; ++s) {
        const Eigen::VectorXd x = random_sphere_point(d, rng);
        const double base = f.raw_eval(x, d);
        for (std::uint64_t pattern = 0; pattern < (1ULL << axes.size()); ++pattern) {
            Eigen::VectorXd flipped = x;
            double sign = 1.0;
            for (size_t i = 0; i < axes.size(); ++i) {
                if (!((pattern >> i) & 1ULL)) continue;
                flipped[axes[i] - 1] = -flipped[axes[i] - 1];
                if (f.term.xi.odd_in(axes[i])) sign = -sign;
            }
            if (std::abs(f.raw_eval(flipped, d) - sign * base) > 1e-10) return false;
        }
    }
    return true;
}

/// Test fixture: a catalog that skips the redundancy omissions (keeps the
/// radial-only N = 2 function). Linearly dependent on the sphere; used as
/// the negative control for the Gram rank check.
inline BasisCatalog make_unpruned_catalog(SphereDim dim, int q, int n_max) {
    BasisCatalog catalog(dim, q, n_max);
    std::vector<BasisFunction> extra;
    for (const TermIndex& term : catalog.terms_) {
        if (term.u.order() != 2) continue;
        if (term.xi.weight() != 0) continue;
        BasisFunction f;
        f.term = term;
        f.kind = BasisKind::disk2d;
        f.total_degree = 2;
        f.radial_j = 1; // P_1(2r^2-1): an even quadratic in r, reducible to 1-D terms
        f.angular = AngularType::cosine;
        f.axis1 = term.u.members()[0];
        f.axis2 = term.u.members()[1];
        extra.push_back(f);
        break;
    }
    for (const BasisFunction& f : extra) catalog.functions_.push_back(f);
    catalog.term_begin_.back() = static_cast<int>(catalog.functions_.size());
    catalog.compute_normalization();
    return catalog;
}

inline nlohmann::json BasisCatalog::to_json() const {
    nlohmann::json j;
    j["d"] = d_;
    j["q"] = q_;
    j["N_max"] = n_max_;
    nlohmann::json funcs = nlohmann::json::array();
    for (const BasisFunction& f : functions_) {
        nlohmann::json e;
        e["u"] = f.term.u.members();
        e["xi"] = f.term.xi.to_string();
        switch (f.kind) {
            case BasisKind::constant: e["kind"] = "constant"; break;
            case BasisKind::gegenbauer1d:
                e["kind"] = "gegenbauer_1d";
                e["k"] = f.degree_k;
                e["axis"] = f.axis1;
                break;
            case BasisKind::disk2d:
                e["kind"] = "disk_2d";
                e["N"] = f.total_degree;
                e["j"] = f.radial_j;
                e["angular"] = f.angular == AngularType::cosine ? "cos" : "sin";
                e["axes"] = {f.axis1, f.axis2};
                break;
        }
        e["norm_constant"] = f.norm_constant;
        funcs.push_back(std::move(e));
    }
    j["functions"] = std::move(funcs);
    return j;
}

inline BasisCatalog BasisCatalog::from_json(const nlohmann::json& j) {
    BasisCatalog catalog(SphereDim(j.at("d").get<int>()), j.at("q").get<int>(),
                         j.at("N_max").get<int>());
    // The catalog layout is fully determined by (d, q, N_max); verify the
    // description matches instead of trusting stored structure blindly.
    const auto& funcs = j.at("functions");
    if (static_cast<int>(funcs.size()) != catalog.size())
        throw std::runtime_error("BasisCatalog::from_json: function count mismatch");
    for (int i = 0; i < catalog.size(); ++i) {
        const double stored = funcs[static_cast<size_t>(i)].at("norm_constant").get<double>();
        if (std::abs(stored - catalog.function(i).norm_constant) >
            1e-9 * std::max(1.0, std::abs(stored)))
            throw std::runtime_error("BasisCatalog::from_json: normalization mismatch");
    }
    return catalog;
}

} // namespace sphanova
