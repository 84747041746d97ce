// Benchmark and verification driver for the spherical ANOVA library.
//
//   sphanova run    --function A --d 10 --M 10000 --q 2 --Nmax 10
//                --seed 1 --strategy both --out results/
//   sphanova verify [--only term-counts]
//
// Exit codes: 0 success, 1 verification failure, 2 infeasible
// configuration, 3 unknown function, 4 I/O failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "sphanova/sphanova.hpp"

namespace fs = std::filesystem;
using namespace sphanova;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUnknownFunction = 3;
constexpr int kExitIo = 4;

struct CliError {
    int code;
    std::string message;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError{kExitIo, "cannot open for writing: " + path.string()};
    out << content;
    if (!out) throw CliError{kExitIo, "write failed: " + path.string()};
}

double parse_number(const std::string& text, bool& ok) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    ok = end && *end == '\0' && !text.empty();
    return v;
}

/// Tabulated samples: each row holds d+1 coordinates followed by the
/// function value. Rows must be unit vectors within 1e-6; deviations
/// above 1e-9 are renormalized with a warning.
SampleSet load_tabulated(const fs::path& path, std::uint64_t seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{kExitIo, "cannot read data file: " + path.string()};
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto rows = parse_csv(text);
    if (!rows.empty()) {
        bool numeric = true;
        for (const auto& cell : rows[0]) {
            bool ok = false;
            parse_number(cell, ok);
            numeric = numeric && ok;
        }
        if (!numeric) rows.erase(rows.begin()); // header line
    }
    if (rows.empty()) throw CliError{kExitIo, "data file has no rows: " + path.string()};

    const size_t width = rows[0].size();
    if (width < 3) throw CliError{kExitIo, "data rows need at least 2 coordinates and a value"};
    SampleSet set;
    set.d = static_cast<int>(width) - 2;
    set.seed = seed;
    set.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width) - 1);
    set.values.resize(static_cast<Eigen::Index>(rows.size()));
    int warned = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != width)
            throw CliError{kExitIo, "ragged data row " + std::to_string(i + 1)};
        for (size_t j = 0; j < width; ++j) {
            bool ok = false;
            const double v = parse_number(rows[i][j], ok);
            if (!ok)
                throw CliError{kExitIo, "non-numeric cell in data row " + std::to_string(i + 1)};
            if (j + 1 < width)
                set.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            else
                set.values[static_cast<Eigen::Index>(i)] = v;
        }
        const double norm = set.points.row(static_cast<Eigen::Index>(i)).norm();
        if (std::abs(norm - 1.0) > 1e-6)
            throw CliError{kExitIo, "data row " + std::to_string(i + 1) +
                                        " is not on the unit sphere (|x| = " +
                                        std::to_string(norm) + ")"};
        if (std::abs(norm - 1.0) > 1e-9) ++warned;
        set.points.row(static_cast<Eigen::Index>(i)) /= norm;
    }
    if (warned)
        std::cerr << "warning: renormalized " << warned << " rows with |x| deviating by more than 1e-9\n";
    return set;
}

struct RunConfig {
    std::string function = "A";
    int d = 10;
    int m = 10000;
    int q = 2;
    int n_max = 10;
    std::uint64_t seed = 1;
    std::string strategy = "both";
    std::string out_dir = "sphanova-out";
    std::string formats = "json,csv";
    std::string data_path;
    bool holdout = true;
    bool d_explicit = false;
};

std::string plotdata_csv(const SobolReport& report) {
    std::string out = "u,index\n";
    for (const auto& e : report.entries) {
        out += detail::csv_quote(e.u.to_string());
        out += ',';
        out += detail::format_double(e.index);
        out += '\n';
    }
    return out;
}

int run_experiment(const RunConfig& config) {
    const bool want_json = config.formats.find("json") != std::string::npos;
    const bool want_csv = config.formats.find("csv") != std::string::npos;
    if (!want_json && !want_csv)
        throw CliError{kExitInfeasible, "formats must include json and/or csv"};

    // Resolve the sample set.
    SampleSet all;
    std::string function_label = config.function;
    const bool tabulated =
        !config.data_path.empty() || config.function.rfind("file:", 0) == 0;
    if (tabulated) {
        const fs::path path =
            config.data_path.empty() ? fs::path(config.function.substr(5)) : fs::path(config.data_path);
        all = load_tabulated(path, config.seed);
        function_label = "file:" + path.string();
        if (config.d_explicit && config.d != all.d)
            throw CliError{kExitInfeasible,
                           "--d " + std::to_string(config.d) + " contradicts the data file (d = " +
                               std::to_string(all.d) + ")"};
        if (config.m > 0 && config.m < all.size()) {
            all.points.conservativeResize(config.m, all.points.cols());
            all.values.conservativeResize(config.m);
        }
    } else {
        NamedTestFunction fn;
        try {
            fn = test_function(config.function, config.d);
        } catch (const std::invalid_argument&) {
            throw CliError{kExitUnknownFunction, "unknown function '" + config.function +
                                                     "' (expected A..F or file:<path>)"};
        }
        all = sample_uniform(SphereDim(config.d), config.m, config.seed);
        all.fill_values(fn.eval);
    }

    const int d = all.d;
    if (config.q > d - 1)
        throw CliError{kExitInfeasible, "q must be at most d-1"};
    const BasisCatalog catalog(SphereDim(d), config.q, config.n_max);

    SampleSet train = all, validation;
    if (config.holdout) std::tie(train, validation) = split_train_validation(all, 0.8);
    if (train.size() < catalog.size())
        throw CliError{kExitInfeasible,
                       "infeasible configuration: " + std::to_string(train.size()) +
                           " fitting samples for " + std::to_string(catalog.size()) +
                           " basis functions (need M >= columns)"};

    std::vector<std::string> strategies;
    if (config.strategy == "both")
        strategies = {"joint", "staged"};
    else if (config.strategy == "joint" || config.strategy == "staged")
        strategies = {config.strategy};
    else
        throw CliError{kExitInfeasible, "strategy must be joint, staged or both"};

    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw CliError{kExitIo, "cannot create output directory: " + config.out_dir};

    json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = {{"function", function_label}, {"d", d},
                          {"M", all.size()},           {"q", config.q},
                          {"N_max", config.n_max},     {"seed", config.seed},
                          {"strategy", config.strategy}, {"formats", config.formats},
                          {"holdout", config.holdout}};
    manifest["catalog_columns"] = catalog.size();
    manifest["fit_samples"] = train.size();
    manifest["strategies"] = json::object();

    for (const std::string& strategy : strategies) {
        const auto t0 = std::chrono::steady_clock::now();
        const AnovaModel model =
            strategy == "joint" ? fit_joint(train, catalog) : fit_staged(train, catalog);
        const SobolReport report = sobol_indices(model, train);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const fs::path dir = fs::path(config.out_dir) / strategy;
        fs::create_directories(dir, ec);
        if (ec) throw CliError{kExitIo, "cannot create output directory: " + dir.string()};

        write_file(dir / "model.json", model.to_json().dump(2) + "\n");
        if (want_json) write_file(dir / "sobol.json", report.to_json().dump(2) + "\n");
        if (want_csv) write_file(dir / "sobol.csv", report.to_csv());
        write_file(dir / "plotdata.csv", plotdata_csv(report));

        json entry;
        entry["iterations"] = model.fit_meta.iterations;
        entry["residual_norm"] = model.fit_meta.residual_norm;
        entry["lsqr_stop_reason"] = model.fit_meta.stop_reason;
        entry["seconds"] = seconds;
        if (config.holdout && validation.size() > 0) {
            double err2 = 0.0;
            for (int i = 0; i < validation.size(); ++i) {
                const double diff =
                    model.predict(validation.points.row(i).transpose()) - validation.values[i];
                err2 += diff * diff;
            }
            entry["validation_rmse"] = std::sqrt(err2 / validation.size());
        }
        manifest["strategies"][strategy] = std::move(entry);

        std::cout << strategy << ": " << catalog.size() << " columns, "
                  << model.fit_meta.iterations << " LSQR iterations, residual "
                  << model.fit_meta.residual_norm << "\n";
        const auto support = index_support(report, 0.01);
        std::cout << "  support@0.01:";
        for (const auto& u : support) std::cout << ' ' << u.to_string();
        std::cout << "\n";
    }

    write_file(fs::path(config.out_dir) / "run-manifest.json", manifest.dump(2) + "\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify: the invariant suites as one command with a pass/fail table.

struct CheckResult {
    bool ok = true;
    std::string detail;
};

using CheckFn = std::function<CheckResult()>;

CheckResult check_term_counts() {
    CheckResult r;
    const auto c2 = count_decomposition_terms(2, false);
    const auto c3 = count_decomposition_terms(3, false);
    const auto c3r = count_decomposition_terms(3, true);
    r.detail = "d=2: " + std::to_string(c2) + " terms; d=3: " + std::to_string(c3) + " -> " +
               std::to_string(c3r) + " after omission";
    if (c2 != 15 || c3 != 49 || c3r != 34) r.ok = false;
    for (int d = 2; d <= 8 && r.ok; ++d) {
        const auto full = static_cast<std::int64_t>(std::pow(3.0, d + 1) + 0.5) -
                          (static_cast<std::int64_t>(1) << d) * (d + 1);
        const auto reduced = 2 * static_cast<std::int64_t>(std::pow(3.0, d) + 0.5) -
                             (static_cast<std::int64_t>(1) << (d - 1)) * (d + 2);
        if (count_decomposition_terms(d, false) != full ||
            count_decomposition_terms(d, true) != reduced) {
            r.ok = false;
            r.detail += "; closed-form mismatch at d=" + std::to_string(d);
        }
    }
    return r;
}

CheckResult check_surface_measure() {
    CheckResult r;
    double even = 2.0, odd = 2.0 * kPi, worst = 0.0;
    for (int d = 2; d <= 50; ++d) {
        double& prev = (d % 2 == 0) ? even : odd;
        prev *= 2.0 * kPi / (d - 1);
        worst = std::max(worst, std::abs(surface_area(d) / prev - 1.0));
    }
    r.detail = "max relative deviation from recurrence: " + std::to_string(worst);
    r.ok = worst < 1e-12 && std::abs(surface_area(0) - 2.0) < 1e-14;
    return r;
}

CheckResult check_gegenbauer_orthogonality() {
    CheckResult r;
    double worst = 0.0;
    for (int d = 2; d <= 12; ++d) {
        const GegenbauerParam p(0.5 * (d - 1));
        for (int k = 0; k <= 10; ++k)
            for (int l = k + 1; l <= 10; ++l)
                worst = std::max(worst, std::abs(integrate_with_sphere_weight(
                                     [&](double x) {
                                         return gegenbauer(k, p, x) * gegenbauer(l, p, x);
                                     },
                                     d - 2)));
    }
    r.detail = "max |<C_k, C_l>| = " + std::to_string(worst);
    r.ok = worst < 1e-9;
    return r;
}

CheckResult check_jacobi_radial() {
    CheckResult r;
    double worst = 0.0;
    for (int d = 3; d <= 12; ++d)
        for (int m = 0; m <= 4; ++m) {
            const JacobiParam p(0.5 * (d - 3), static_cast<double>(m));
            for (int j = 0; j <= 5; ++j)
                for (int l = j + 1; l <= 5; ++l)
                    worst = std::max(worst, std::abs(integrate_radial_weight(
                                         [&](double rr) {
                                             const double t = 2.0 * rr * rr - 1.0;
                                             return jacobi(j, p, t) * jacobi(l, p, t);
                                         },
                                         d - 3, 2 * m + 1)));
        }
    r.detail = "max radial |<P_j, P_l>| = " + std::to_string(worst);
    r.ok = worst < 1e-9;
    return r;
}

CheckResult check_parity(bool inject_redundant) {
    CheckResult r;
    const int d = 6;
    const BasisCatalog catalog =
        inject_redundant ? make_unpruned_catalog(SphereDim(d), 2, 6) : BasisCatalog(SphereDim(d), 2, 6);
    int failures = 0;
    for (const auto& f : catalog.functions())
        if (!verify_parity(f, d, 30)) ++failures;

    // Negative control: a deliberately mislabeled function must fail.
    BasisFunction wrong = catalog.function(1);
    wrong.term.xi = ParityVector(wrong.term.xi.bits() ^ 1ULL, d + 1);
    const bool control_fails = !verify_parity(wrong, d, 30);

    r.detail = std::to_string(catalog.size()) + " functions, " + std::to_string(failures) +
               " parity failures; negative control " + (control_fails ? "detected" : "MISSED");
    r.ok = failures == 0 && control_fails;
    return r;
}

CheckResult check_zero_mean() {
    CheckResult r;
    const int d = 6, m = 20000;
    const BasisCatalog catalog(SphereDim(d), 2, 6);
    const SampleSet samples = sample_uniform(SphereDim(d), m, 101);
    const DesignMatrix design = assemble(samples, catalog);
    double worst_t = 0.0;
    for (int l = 1; l < catalog.size(); ++l) {
        const double mean = design.values.col(l).mean();
        const double sd = std::sqrt(
            (design.values.col(l).array() - mean).square().sum() / (m - 1.0));
        worst_t = std::max(worst_t, std::abs(mean) / (sd / std::sqrt(static_cast<double>(m))));
    }
    r.detail = "worst |mean|/SE = " + std::to_string(worst_t);
    r.ok = worst_t < 5.0;
    return r;
}

CheckResult check_gram_rank(bool inject_redundant) {
    CheckResult r;
    const int d = 6, m = 4000;
    const BasisCatalog catalog =
        inject_redundant ? make_unpruned_catalog(SphereDim(d), 2, 6) : BasisCatalog(SphereDim(d), 2, 6);
    const SampleSet samples = sample_uniform(SphereDim(d), m, 103);
    const DesignMatrix design = assemble(samples, catalog);
    Eigen::MatrixXd gram = design.values.transpose() * design.values / m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lambda_min = eig.eigenvalues().minCoeff();
    char buf[64];
    std::snprintf(buf, sizeof(buf), "smallest Gram eigenvalue = %.3e", lambda_min);
    r.detail = buf;
    r.ok = lambda_min > 1e-6;
    return r;
}

CheckResult check_appendix_oracles() {
    CheckResult r;
    r.detail = "";
    for (int d : {4, 10}) {
        BlackBoxFunction quartic{[](const Eigen::VectorXd& x) { return std::pow(x[0], 4); }, d};
        const McEstimate est =
            project(quartic, IndexSet::empty(d + 1), Eigen::VectorXd(0), {200000, 7});
        const double expected = 3.0 / ((d + 3.0) * (d + 1.0));
        if (std::abs(est.value - expected) > 3.0 * est.se) {
            r.ok = false;
            r.detail += "P_0 x1^4 off at d=" + std::to_string(d) + "; ";
        }
        BlackBoxFunction square{[](const Eigen::VectorXd& x) { return x[1] * x[1]; }, d};
        const McEstimate est2 =
            project(square, IndexSet::empty(d + 1), Eigen::VectorXd(0), {200000, 8});
        if (std::abs(est2.value - 1.0 / (d + 1.0)) > 3.0 * est2.se) {
            r.ok = false;
            r.detail += "P_0 x2^2 off at d=" + std::to_string(d) + "; ";
        }
    }
    const int d = 10;
    Xoshiro256pp rng(11);
    double worst = 0.0;
    for (const std::string name : {"A", "B", "C"}) {
        const NamedTestFunction f = test_function(name, d);
        const auto terms = analytic_terms(name, d);
        for (int trial = 0; trial < 200; ++trial) {
            const Eigen::VectorXd x = random_sphere_point(d, rng);
            double sum = 0.0;
            for (const auto& term : terms) {
                Eigen::VectorXd y(term.term.u.order());
                for (int i = 0; i < term.term.u.order(); ++i)
                    y[i] = x[term.term.u.members()[static_cast<size_t>(i)] - 1];
                sum += term.closed_form(y);
            }
            worst = std::max(worst, std::abs(sum - f.eval(x)));
        }
    }
    char buf[80];
    std::snprintf(buf, sizeof(buf), "max |sum(terms) - f| = %.2e", worst);
    r.detail += buf;
    r.ok = r.ok && worst < 1e-12;
    return r;
}

CheckResult check_moebius() {
    CheckResult r;
    const int d = 4;
    BlackBoxFunction f{[](const Eigen::VectorXd& x) { return x[0] * x[0] + x[1] * x[3]; }, d};
    double worst = 0.0;
    Xoshiro256pp rng(13);
    for (const auto& members : std::vector<std::vector<int>>{{2}, {1, 3}}) {
        const IndexSet u(members, d + 1);
        Eigen::VectorXd y = 0.7 * rng.uniform01() * random_sphere_point(u.order() - 1, rng);
        const auto [iterative, moebius] = iterative_vs_moebius(f, u, y, {20000, 17});
        worst = std::max(worst, std::abs(iterative - moebius));
    }
    char buf[80];
    std::snprintf(buf, sizeof(buf), "max |iterative - moebius| = %.2e", worst);
    r.detail = buf;
    r.ok = worst < 1e-9;
    return r;
}

CheckResult check_integral_condition_suite() {
    CheckResult r;
    const int d = 4;
    const IndexSet u({1}, d + 1);
    const auto odd =
        check_integral_conditions([](const Eigen::VectorXd& t) { return t[0]; }, u, d, 6,
                                  {20000, 19});
    const auto even = check_integral_conditions(
        [](const Eigen::VectorXd& t) { return t[0] * t[0]; }, u, d, 6, {20000, 20});
    char buf[120];
    std::snprintf(buf, sizeof(buf), "odd worst t = %.2f; even worst t = %.1f (max viol %.3f)",
                  odd.max_t, even.max_t, even.max_abs_value);
    r.detail = buf;
    r.ok = odd.max_t <= 4.5 && even.max_t > 20.0 && even.max_abs_value > 0.1;
    return r;
}

int run_verify(const std::string& only, bool inject_redundant) {
    std::vector<std::pair<std::string, CheckFn>> checks = {
        {"term-counts", check_term_counts},
        {"omega", check_surface_measure},
        {"gegenbauer-orthogonality", check_gegenbauer_orthogonality},
        {"jacobi-radial", check_jacobi_radial},
        {"parity", [&] { return check_parity(inject_redundant); }},
        {"zero-mean", check_zero_mean},
        {"gram-rank", [&] { return check_gram_rank(inject_redundant); }},
        {"appendix-oracles", check_appendix_oracles},
        {"moebius", check_moebius},
        {"integral-conditions", check_integral_condition_suite},
    };

    bool any = false;
    std::string first_failure;
    for (const auto& [name, fn] : checks) {
        if (!only.empty() && name != only) continue;
        any = true;
        const auto t0 = std::chrono::steady_clock::now();
        const CheckResult result = fn();
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%-26s %s  (%.1fs)  %s\n", name.c_str(), result.ok ? "PASS" : "FAIL", seconds,
                    result.detail.c_str());
        if (!result.ok && first_failure.empty()) first_failure = name;
    }
    if (!any) {
        std::cerr << "no check named '" << only << "'\n";
        return kExitVerifyFailed;
    }
    if (!first_failure.empty()) {
        std::cerr << "first failing check: " << first_failure << "\n";
        return kExitVerifyFailed;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spherical ANOVA decomposition benchmark"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    RunConfig config;
    CLI::App* run = app.add_subcommand("run", "fit a function and report Sobol indices");
    run->add_option("--function", config.function, "A..F or file:<csv path>");
    run->add_option("--d", config.d, "sphere dimension (ambient d+1)");
    run->add_option("--M", config.m, "number of samples");
    run->add_option("--q", config.q, "maximal term order (1 or 2)");
    run->add_option("--Nmax", config.n_max, "maximal polynomial degree");
    run->add_option("--seed", config.seed, "RNG seed");
    run->add_option("--strategy", config.strategy, "joint, staged or both");
    run->add_option("--out", config.out_dir, "output directory");
    run->add_option("--format", config.formats, "comma list from {json,csv}");
    run->add_option("--data", config.data_path, "tabulated samples (csv)");
    run->add_flag("--holdout,!--no-holdout", config.holdout,
                  "hold out 20% of samples for validation (default on)");

    std::string only;
    bool inject_redundant = false;
    CLI::App* verify = app.add_subcommand("verify", "run the invariant suites");
    verify->add_option("--only", only, "run a single named check");
    verify->add_flag("--inject-redundant-basis", inject_redundant,
                     "test fixture: skip basis omissions (expected to fail gram-rank)")
        ->group("");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            config.d_explicit = run->count("--d") > 0;
            return run_experiment(config);
        }
        return run_verify(only, inject_redundant);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    }
}
