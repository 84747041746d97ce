#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphanova/fitter.hpp"

namespace sphanova {

struct SobolEntry {
    IndexSet u;
    double variance = 0.0; // sum over parities of the term variances
    double index = 0.0;    // variance / total sample variance
    std::vector<std::pair<ParityVector, double>> per_xi;
};

/// Per-index-set variance contributions of a fitted model, normalized by
/// the unbiased sample variance of the observed values. Entries are
/// sorted by decreasing index. The indices are a relative importance
/// measure; same-parity terms of different u are not orthogonal, so they
/// are not asserted to sum to one.
struct SobolReport {
    int d = 0, q = 0, n_max = 0, m = 0;
    std::uint64_t seed = 0;
    std::string strategy;
    double total_sample_variance = 0.0;
    bool constant_function = false; // set when the sample variance vanishes
    std::vector<SobolEntry> entries;

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

/// (1/M) sum_x |sum_k a_k eta_k(x_u)|^2 over the term's own columns.
inline double term_variance(const AnovaModel& model, const TermIndex& term,
                            const SampleSet& samples) {
    const int t = model.catalog->find_term(term);
    if (t < 0) throw std::invalid_argument("term_variance: term not present in catalog");
    const int begin = model.catalog->term_begin(t);
    const int end = model.catalog->term_end(t);
    double sum = 0.0;
    for (int i = 0; i < samples.size(); ++i) {
        const Eigen::VectorXd x = samples.points.row(i).transpose();
        double v = 0.0;
        for (int l = begin; l < end; ++l)
            v += model.coefficients[l] * model.catalog->evaluate(l, x);
        sum += v * v;
    }
    return sum / samples.size();
}

/// Same, against a prebuilt design matrix on the evaluation points.
inline double term_variance(const AnovaModel& model, int term_idx, const DesignMatrix& design) {
    const int begin = model.catalog->term_begin(term_idx);
    const int end = model.catalog->term_end(term_idx);
    if (begin == end) return 0.0;
    const Eigen::VectorXd values =
        design.values.middleCols(begin, end - begin) *
        model.coefficients.segment(begin, end - begin);
    return values.squaredNorm() / static_cast<double>(design.rows());
}

namespace detail {
template <typename VarianceFn>
SobolReport build_sobol_report(const AnovaModel& model, const Eigen::VectorXd& values, int m,
                               std::uint64_t seed, VarianceFn&& variance_of_term) {
    const BasisCatalog& catalog = *model.catalog;
    SobolReport report;
    report.d = catalog.d();
    report.q = catalog.max_order();
    report.n_max = catalog.max_degree();
    report.m = m;
    report.seed = seed;
    report.strategy = model.fit_meta.strategy;

    const double mean = values.mean();
    const double ss = (values.array() - mean).square().sum();
    report.total_sample_variance = m > 1 ? ss / (m - 1) : 0.0;
    report.constant_function = report.total_sample_variance <= 0.0;

    // Group term variances by u, keeping the per-parity breakdown.
    std::vector<SobolEntry> entries;
    for (int t = 0; t < catalog.term_count(); ++t) {
        const TermIndex& term = catalog.terms()[static_cast<size_t>(t)];
        if (term.u.order() == 0) continue;
        const double var = variance_of_term(t);
        auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const SobolEntry& e) { return e.u == term.u; });
        if (it == entries.end()) {
            entries.push_back({term.u, 0.0, 0.0, {}});
            it = std::prev(entries.end());
        }
        it->variance += var;
        it->per_xi.emplace_back(term.xi, var);
    }
    for (SobolEntry& e : entries)
        e.index = report.constant_function ? 0.0 : e.variance / report.total_sample_variance;

    std::sort(entries.begin(), entries.end(), [](const SobolEntry& a, const SobolEntry& b) {
        if (a.index != b.index) return a.index > b.index;
        return a.u < b.u;
    });
    report.entries = std::move(entries);
    return report;
}
} // namespace detail

/// Sobol indices S~_u = sum_xi sigma^2(f_{u,xi}) / sigma^2(y). The
/// evaluation set defaults to the fitting samples; pass an independent
/// set to reduce the optimistic bias.
inline SobolReport sobol_indices(const AnovaModel& model, const SampleSet& samples) {
    if (samples.values.size() != samples.points.rows())
        throw std::invalid_argument("sobol_indices: samples carry no function values");
    return detail::build_sobol_report(
        model, samples.values, samples.size(), samples.seed, [&](int t) {
            return term_variance(model, model.catalog->terms()[static_cast<size_t>(t)], samples);
        });
}

/// Variant working off a prebuilt design matrix for the same points.
inline SobolReport sobol_indices(const AnovaModel& model, const Eigen::VectorXd& values,
                                 const DesignMatrix& design, std::uint64_t seed) {
    if (values.size() != design.values.rows())
        throw std::invalid_argument("sobol_indices: value/design size mismatch");
    return detail::build_sobol_report(model, values, design.rows(), seed,
                                      [&](int t) { return term_variance(model, t, design); });
}

/// All index sets whose index reaches `threshold` times the largest one,
/// in decreasing order.
inline std::vector<IndexSet> index_support(const SobolReport& report, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("index_support: 0 < threshold < 1 required");
    std::vector<IndexSet> support;
    if (report.entries.empty()) return support;
    const double max_index = report.entries.front().index;
    if (max_index <= 0.0) return support;
    for (const SobolEntry& e : report.entries)
        if (e.index >= threshold * max_index) support.push_back(e.u);
    return support;
}

inline nlohmann::json SobolReport::to_json() const {
    nlohmann::json j;
    j["d"] = d;
    j["q"] = q;
    j["N_max"] = n_max;
    j["M"] = m;
    j["seed"] = seed;
    j["strategy"] = strategy;
    j["total_sample_variance"] = total_sample_variance;
    j["constant_function"] = constant_function;
    nlohmann::json rows = nlohmann::json::array();
    for (const SobolEntry& e : entries) {
        nlohmann::json row;
        row["u"] = e.u.members();
        row["variance"] = e.variance;
        row["index"] = e.index;
        nlohmann::json breakdown = nlohmann::json::array();
        for (const auto& [xi, var] : e.per_xi)
            breakdown.push_back({{"xi", xi.to_string()}, {"variance", var}});
        row["xi_breakdown"] = std::move(breakdown);
        rows.push_back(std::move(row));
    }
    j["entries"] = std::move(rows);
    return j;
}

namespace detail {
/// Shortest decimal form that round-trips a double exactly.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}
} // namespace detail

/// CSV schema: header `u,index,variance,xi_breakdown_json`; index sets as
/// "{1,2}" strings; UTF-8 with LF line endings. Values are printed with
/// enough digits to round-trip exactly.
inline std::string SobolReport::to_csv() const {
    std::string out = "u,index,variance,xi_breakdown_json\n";
    for (const SobolEntry& e : entries) {
        nlohmann::json breakdown = nlohmann::json::array();
        for (const auto& [xi, var] : e.per_xi)
            breakdown.push_back({{"xi", xi.to_string()}, {"variance", var}});
        out += detail::csv_quote(e.u.to_string());
        out += ',';
        out += detail::format_double(e.index);
        out += ',';
        out += detail::format_double(e.variance);
        out += ',';
        out += detail::csv_quote(breakdown.dump());
        out += '\n';
    }
    return out;
}

/// Minimal CSV reader for the schema above (round-trip checks and the
/// tabulated-data loader share it). Handles quoted fields with doubled
/// quotes; rows are LF-terminated.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    if (!field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace sphanova
