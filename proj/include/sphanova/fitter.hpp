#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sphanova/basis.hpp"
#include "sphanova/sphere.hpp"

namespace sphanova {

/// Internal parallelism cap: SPHANOVA_THREADS if set, else the hardware
/// concurrency. Work is split by fixed row blocks, so results do not
/// depend on the thread count.
inline int worker_threads() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("SPHANOVA_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Evaluations of every catalog function at every sample point, M x N.
struct DesignMatrix {
    RowMajorMatrix values;
    const BasisCatalog* catalog = nullptr;

    int rows() const { return static_cast<int>(values.rows()); }
    int cols() const { return static_cast<int>(values.cols()); }
};

/// Fill the design matrix A_{i,l} = eta_l(x_i). Rows are computed in
/// parallel blocks; entry values are independent of the schedule.
inline DesignMatrix assemble(const SampleSet& samples, const BasisCatalog& catalog) {
    if (samples.d != catalog.d())
        throw std::invalid_argument("assemble: sample dimension does not match catalog");
    const int m = samples.size();
    const int n = catalog.size();
    DesignMatrix design;
    design.catalog = &catalog;
    design.values.resize(m, n);

    const int threads = std::min(worker_threads(), std::max(1, m));
    auto fill_rows = [&](int row_begin, int row_end) {
        for (int i = row_begin; i < row_end; ++i) {
            const Eigen::VectorXd x = samples.points.row(i).transpose();
            for (int l = 0; l < n; ++l) design.values(i, l) = catalog.evaluate(l, x);
        }
    };
    if (threads == 1) {
        fill_rows(0, m);
    } else {
        std::vector<std::thread> pool;
        const int block = (m + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int begin = t * block;
            const int end = std::min(m, begin + block);
            if (begin < end) pool.emplace_back(fill_rows, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return design;
}

struct LsqrOptions {
    double atol = 1e-8;
    double btol = 1e-8;
    double conlim = 1e8;
    int max_iters = 0;    // 0: use 4*N
    double damp = 0.0;    // Tikhonov damping, off by default
};

struct FitMeta {
    std::string strategy = "joint";
    int iterations = 0;
    double residual_norm = 0.0;
    std::string stop_reason;
    std::uint64_t seed = 0;
    std::vector<double> residual_history;
};

/// LSQR (Paige & Saunders): minimizes |A c - y|_2 (plus optional damping)
/// through Golub-Kahan bidiagonalization. Stops on the usual atol/btol
/// compatibility tests, the condition-number estimate against conlim, or
/// the iteration cap.
template <typename MatrixT>
std::pair<Eigen::VectorXd, FitMeta> lsqr_solve(const MatrixT& a, const Eigen::VectorXd& y,
                                               const LsqrOptions& opts = {}) {
    const auto m = a.rows();
    const auto n = a.cols();
    if (y.size() != m) throw std::invalid_argument("lsqr_solve: length of y must equal rows of A");
    if (!y.allFinite() || !a.allFinite())
        throw std::invalid_argument("lsqr_solve: non-finite entries in input");

    const int max_iters = opts.max_iters > 0 ? opts.max_iters : 4 * static_cast<int>(n);
    FitMeta meta;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);

    Eigen::VectorXd u = y;
    double beta = u.norm();
    const double bnorm = beta;
    if (beta == 0.0) {
        meta.stop_reason = "b = 0; exact zero solution";
        return {x, meta};
    }
    u /= beta;
    Eigen::VectorXd v = a.transpose() * u;
    double alpha = v.norm();
    if (alpha == 0.0) {
        meta.stop_reason = "A'b = 0; zero solution is optimal";
        meta.residual_norm = beta;
        return {x, meta};
    }
    v /= alpha;

    Eigen::VectorXd w = v;
    double phi_bar = beta;
    double rho_bar = alpha;
    double anorm2 = 0.0;
    double res_norm = beta;
    double res2 = 0.0; // accumulated damping-rotation contributions to |r|^2
    double xnorm = 0.0;
    double dd_norm2 = 0.0; // accumulates |D|_F^2 for the condition estimate
    double arnorm = alpha * beta;

    meta.residual_history.push_back(res_norm);
    int it = 0;
    std::string reason;
    const double ctol = opts.conlim > 0 ? 1.0 / opts.conlim : 0.0;

    while (it < max_iters) {
        ++it;
        u = a * v - alpha * u;
        beta = u.norm();
        if (beta > 0.0) u /= beta;
        anorm2 += alpha * alpha + beta * beta + opts.damp * opts.damp;

        v = a.transpose() * u - beta * v;
        alpha = v.norm();
        if (alpha > 0.0) v /= alpha;

        // Eliminate the damping term, then the subdiagonal, by plane rotations.
        double rho_bar1 = rho_bar;
        double phi_bar1 = phi_bar;
        if (opts.damp > 0.0) {
            rho_bar1 = std::hypot(rho_bar, opts.damp);
            const double cs1 = rho_bar / rho_bar1;
            const double sn1 = opts.damp / rho_bar1;
            phi_bar1 = cs1 * phi_bar;
            res2 += sn1 * phi_bar * sn1 * phi_bar;
        }
        const double rho = std::hypot(rho_bar1, beta);
        const double cs = rho_bar1 / rho;
        const double sn = beta / rho;
        const double theta = sn * alpha;
        rho_bar = -cs * alpha;
        const double phi = cs * phi_bar1;
        phi_bar = sn * phi_bar1;

        x += (phi / rho) * w;
        dd_norm2 += w.squaredNorm() / (rho * rho);
        w = v - (theta / rho) * w;

        res_norm = std::sqrt(phi_bar * phi_bar + res2);
        arnorm = std::abs(phi_bar * alpha * cs);
        xnorm = x.norm();
        const double anorm = std::sqrt(anorm2);
        const double acond = anorm * std::sqrt(dd_norm2);
        meta.residual_history.push_back(res_norm);

        const double test1 = res_norm / bnorm;
        const double test2 = arnorm / std::max(1e-300, anorm * res_norm);
        const double rtol = opts.btol + opts.atol * anorm * xnorm / bnorm;
        if (test1 <= rtol) {
            reason = "residual test (atol/btol) satisfied";
            break;
        }
        if (test2 <= opts.atol) {
            reason = "least-squares optimality test (atol) satisfied";
            break;
        }
        if (ctol > 0.0 && 1.0 / acond <= ctol) {
            reason = "condition estimate exceeded conlim";
            break;
        }
    }
    if (reason.empty()) reason = "iteration limit reached";

    meta.iterations = it;
    meta.residual_norm = res_norm;
    meta.stop_reason = reason;
    return {x, meta};
}

/// Coefficients a_k^{u,xi} for every catalog function plus fit metadata.
/// The constant column is part of the catalog; its coefficient is the
/// intercept a_0.
struct AnovaModel {
    const BasisCatalog* catalog = nullptr;
    Eigen::VectorXd coefficients;
    FitMeta fit_meta;

    double intercept() const { return coefficients.size() ? coefficients[0] : 0.0; }

    double predict(const Eigen::VectorXd& x) const {
        double sum = 0.0;
        for (int l = 0; l < catalog->size(); ++l)
            sum += coefficients[l] * catalog->evaluate(l, x);
        return sum;
    }

    /// Value of the fitted term (u, xi) alone: only this term's columns.
    double term_value(int term_idx, const Eigen::VectorXd& x) const {
        double sum = 0.0;
        for (int l = catalog->term_begin(term_idx); l < catalog->term_end(term_idx); ++l)
            sum += coefficients[l] * catalog->evaluate(l, x);
        return sum;
    }

    nlohmann::json to_json() const;
};

/// Single least-squares solve over all columns (orders 0..q together).
/// The design-matrix overloads allow reusing one assembled matrix for
/// several value vectors on the same points.
inline AnovaModel fit_joint(const DesignMatrix& design, const Eigen::VectorXd& y,
                            std::uint64_t seed, const LsqrOptions& opts = {}) {
    auto [coef, meta] = lsqr_solve(design.values, y, opts);
    meta.strategy = "joint";
    meta.seed = seed;
    AnovaModel model;
    model.catalog = design.catalog;
    model.coefficients = std::move(coef);
    model.fit_meta = std::move(meta);
    return model;
}

inline AnovaModel fit_joint(const SampleSet& samples, const BasisCatalog& catalog,
                            const LsqrOptions& opts = {}) {
    return fit_joint(assemble(samples, catalog), samples.values, samples.seed, opts);
}

/// Order-incremental fit: solve with the constant and all order-1 columns
/// first, then fit the order-2 columns against the residual of that
/// stage. The intercept is fitted in stage one and left untouched.
inline AnovaModel fit_staged(const DesignMatrix& design, const Eigen::VectorXd& y,
                             std::uint64_t seed, const LsqrOptions& opts = {}) {
    const BasisCatalog& catalog = *design.catalog;
    const int n = catalog.size();

    std::vector<int> low_cols, high_cols;
    for (int t = 0; t < catalog.term_count(); ++t) {
        auto& dst = catalog.terms()[static_cast<size_t>(t)].u.order() <= 1 ? low_cols : high_cols;
        for (int l = catalog.term_begin(t); l < catalog.term_end(t); ++l) dst.push_back(l);
    }

    Eigen::VectorXd coef = Eigen::VectorXd::Zero(n);
    const RowMajorMatrix a_low = design.values(Eigen::all, low_cols);
    auto [c_low, meta_low] = lsqr_solve(a_low, y, opts);
    for (size_t i = 0; i < low_cols.size(); ++i)
        coef[low_cols[i]] = c_low[static_cast<Eigen::Index>(i)];

    FitMeta meta = meta_low;
    if (!high_cols.empty()) {
        const Eigen::VectorXd residual = y - a_low * c_low;
        const RowMajorMatrix a_high = design.values(Eigen::all, high_cols);
        auto [c_high, meta_high] = lsqr_solve(a_high, residual, opts);
        for (size_t i = 0; i < high_cols.size(); ++i)
            coef[high_cols[i]] = c_high[static_cast<Eigen::Index>(i)];
        meta.iterations += meta_high.iterations;
        meta.residual_norm = meta_high.residual_norm;
        meta.stop_reason = "stage1: " + meta_low.stop_reason + "; stage2: " + meta_high.stop_reason;
        meta.residual_history = std::move(meta_high.residual_history);
    }
    meta.strategy = "staged";
    meta.seed = seed;

    AnovaModel model;
    model.catalog = &catalog;
    model.coefficients = std::move(coef);
    model.fit_meta = std::move(meta);
    return model;
}

inline AnovaModel fit_staged(const SampleSet& samples, const BasisCatalog& catalog,
                             const LsqrOptions& opts = {}) {
    return fit_staged(assemble(samples, catalog), samples.values, samples.seed, opts);
}

/// Deterministic 80/20 split keyed by the sample seed, for held-out error
/// reporting.
inline std::pair<SampleSet, SampleSet> split_train_validation(const SampleSet& samples,
                                                              double train_fraction = 0.8) {
    const int m = samples.size();
    std::vector<int> order(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) order[static_cast<size_t>(i)] = i;
    Xoshiro256pp rng(derive_seed(samples.seed, 0x53504cu));
    for (int i = m - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }
    const int train_count = std::max(1, static_cast<int>(std::floor(train_fraction * m)));

    auto take = [&](int begin, int end) {
        SampleSet out;
        out.d = samples.d;
        out.seed = samples.seed;
        out.points.resize(end - begin, samples.points.cols());
        out.values.resize(samples.values.size() ? end - begin : 0);
        for (int i = begin; i < end; ++i) {
            out.points.row(i - begin) = samples.points.row(order[static_cast<size_t>(i)]);
            if (samples.values.size())
                out.values[i - begin] = samples.values[order[static_cast<size_t>(i)]];
        }
        return out;
    };
    return {take(0, train_count), take(train_count, m)};
}

inline nlohmann::json AnovaModel::to_json() const {
    nlohmann::json j;
    j["d"] = catalog->d();
    j["q"] = catalog->max_order();
    j["N_max"] = catalog->max_degree();
    j["seed"] = fit_meta.seed;
    j["strategy"] = fit_meta.strategy;
    j["catalog"] = catalog->to_json();
    j["coefficients"] = std::vector<double>(coefficients.data(),
                                            coefficients.data() + coefficients.size());
    j["fit_meta"] = {{"iterations", fit_meta.iterations},
                     {"residual_norm", fit_meta.residual_norm},
                     {"stop_reason", fit_meta.stop_reason}};
    return j;
}

} // namespace sphanova
