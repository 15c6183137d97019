// Acceptance suite: one [PASS]/[FAIL] line per criterion.
//
//   dsreg_acceptance            run all nine
//   dsreg_acceptance --only 4   run one
//
// Sweep tables and plots are written under ./acceptance_out.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <dsreg/certificate.hpp>
#include <dsreg/experiments.hpp>
#include <dsreg/plot.hpp>
#include <dsreg/prox.hpp>
#include <dsreg/simgen.hpp>
#include <dsreg/solvers.hpp>

#include "support/grid_oracle.hpp"
#include "support/rip_oracle.hpp"

using namespace dsreg;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const fs::path out_dir = "acceptance_out";

ExperimentConfig config(const std::string& name)
{
    return load_config(fs::path(DSREG_SOURCE_DIR) / "configs" / name);
}

void save(const SweepOutcome& out, const std::string& stem, const std::string& metric,
          const std::string& title)
{
    fs::create_directories(out_dir);
    std::ofstream os(out_dir / (stem + ".csv"));
    write_sweep_csv(os, out.rows);
    write_plot(out_dir / (stem + ".svg"), out.rows, {metric, title, "n", metric});
}

// 1. Prox against brute-force grid minimization in two dimensions.
Outcome prox_oracle()
{
    std::mt19937_64 rng(101);
    std::normal_distribution<double> g(0.0, 2.0);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const GroupPartition part({2});
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const double v0 = g(rng), v1 = g(rng), lam = u(rng), lam_g = u(rng);
        const Vector p =
            sparse_group_prox(GroupedVector(Vector{{v0, v1}}, part), {lam, lam_g}).values;
        const auto ref = dsreg::testing::grid_minimize_2d(
            [&](double a, double b) {
                return 0.5 * ((a - v0) * (a - v0) + (b - v1) * (b - v1)) +
                       lam * (std::abs(a) + std::abs(b)) + lam_g * std::hypot(a, b);
            },
            -10, 10, 201, 14);
        worst = std::max({worst, std::abs(p[0] - ref[0]), std::abs(p[1] - ref[1])});
    }
    return {worst <= 1e-4, "200 instances, max |prox - grid argmin| = " + fmt("%.2e", worst)};
}

// 2. Soft-thresholding triangle inequality and inner-product bound.
Outcome soft_threshold_properties()
{
    std::mt19937_64 rng(202);
    std::normal_distribution<double> g(0.0, 3.0);
    std::exponential_distribution<double> e(1.0);
    const int samples = 100000;
    int tri_bad = 0, dual_bad = 0;
    for (int t = 0; t < samples; ++t) {
        const double a = e(rng), b = e(rng), x = g(rng), y = g(rng);
        const double lhs = std::abs(soft_threshold(x + y, a + b));
        const double rhs = std::abs(soft_threshold(x, a)) + std::abs(soft_threshold(y, b));
        // Rounding allowance of a few ulps of the operands.
        tri_bad += lhs > rhs + 1e-14 * (1.0 + std::abs(x) + std::abs(y) + a + b);
    }
    const GroupPartition part({1, 2, 3, 4, 2});
    for (int t = 0; t < samples; ++t) {
        Vector x(part.p()), y(part.p());
        for (auto& v : x) v = g(rng);
        for (auto& v : y) v = g(rng);
        const double a = e(rng);
        // Smallest admissible b, inflated at random half the time.
        double b = mixed_norm(soft_threshold(x, a), part, NormOrder::Inf, NormOrder::Two);
        if (t % 2) b += e(rng);
        if (b <= 0) b = 1e-300;
        const double lhs = std::abs(x.dot(y));
        const double rhs = a * y.lpNorm<1>() + b * mixed_norm(y, part, NormOrder::One, NormOrder::Two);
        dual_bad += lhs > rhs + 1e-12 * (1.0 + rhs);
    }
    return {tri_bad == 0 && dual_bad == 0,
            "1e5 samples each: triangle violations " + std::to_string(tri_bad) +
                ", inner-product violations " + std::to_string(dual_bad)};
}

// 3. Objective against the cvxpy oracle, then stationarity on larger problems.
struct OracleInstance
{
    int n, p;
    std::vector<Index> sizes;
    std::vector<double> X, y;
    double lam, lam_g, obj;
};

const std::vector<OracleInstance> oracle_instances{
#include "oracles/sgl_instances.inc"
};

// Independent stationarity residual: largest group norm of the subgradient
// mismatch of ||y - X b||^2 + lam ||b||_1 + lam_g ||b||_{1,2}.
double stationarity(const Dataset& d, const Vector& b, double lam, double lam_g)
{
    const Vector grad = 2.0 * d.X.transpose() * (d.X * b - d.y);
    double worst = 0.0;
    for (Index j = 0; j < d.partition.d(); ++j) {
        const auto bj = d.partition.segment(b, j);
        const auto gj = d.partition.segment(grad, j);
        const double nb = bj.norm();
        Vector r(bj.size());
        if (nb == 0.0) {
            for (Index i = 0; i < r.size(); ++i)
                r[i] = std::copysign(std::max(0.0, std::abs(gj[i]) - lam), gj[i]);
            worst = std::max(worst, std::max(0.0, r.norm() - lam_g));
            continue;
        }
        for (Index i = 0; i < r.size(); ++i) {
            if (bj[i] != 0.0)
                r[i] = gj[i] + lam * (bj[i] > 0 ? 1.0 : -1.0) + lam_g * bj[i] / nb;
            else
                r[i] = std::max(0.0, std::abs(gj[i]) - lam);
        }
        worst = std::max(worst, r.norm());
    }
    return worst;
}

Outcome solver_correctness()
{
    double worst_obj = 0.0;
    for (const auto& inst : oracle_instances) {
        const Matrix X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                       Eigen::RowMajor>>(inst.X.data(), inst.n, inst.p);
        const Vector y = Eigen::Map<const Vector>(inst.y.data(), inst.n);
        const Dataset d = make_dataset(X, y, GroupPartition(inst.sizes));
        SolveOptions o;
        o.tol_kkt = 1e-10;
        const auto r = solve_sgl(d, inst.lam, inst.lam_g, o);
        worst_obj = std::max(worst_obj, std::abs(r.objective - inst.obj));
    }

    std::mt19937_64 rng(303);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> frac(0.02, 0.5);
    double worst_kkt = 0.0;
    int not_converged = 0;
    for (int t = 0; t < 100; ++t) {
        const Index n = 30 + static_cast<Index>(rng() % 71);
        const Index d = 5 + static_cast<Index>(rng() % 26);
        std::vector<Index> sizes;
        for (Index j = 0; j < d; ++j) sizes.push_back(1 + static_cast<Index>(rng() % 8));
        const GroupPartition part(sizes);
        Matrix X(n, part.p());
        for (auto& v : X.reshaped()) v = g(rng);
        Vector beta = Vector::Zero(part.p());
        for (Index j = 0; j < std::min<Index>(3, d); ++j)
            for (Index i = part.offset(j); i < part.offset(j) + part.size(j); ++i) beta[i] = g(rng);
        Vector y = X * beta;
        for (auto& v : y) v += 0.5 * g(rng);
        const Dataset data = make_dataset(X, y, part);
        const double top = 2.0 * (X.transpose() * y).lpNorm<Eigen::Infinity>();
        const double lam = frac(rng) * top, lam_g = frac(rng) * top;
        SolveOptions o;
        o.tol_kkt = 1e-7;
        const auto r = solve_sgl(data, lam, lam_g, o);
        not_converged += r.status != SolveStatus::Converged;
        worst_kkt = std::max(worst_kkt, stationarity(data, r.beta_hat.values, lam, lam_g));
    }
    return {worst_obj <= 1e-6 && worst_kkt <= 1e-6 && not_converged == 0,
            std::to_string(oracle_instances.size()) + " oracle instances, max |dF| = " +
                fmt("%.2e", worst_obj) + "; 100 larger instances, max KKT = " +
                fmt("%.2e", worst_kkt) + ", unconverged " + std::to_string(not_converged)};
}

// 4. Exact recovery phase transition on 20 groups of 20.
Outcome recovery_design3()
{
    auto cfg = config("recovery_design3.json");
    cfg.methods = {Method::Sgl};
    const auto out = run_recovery_sweep(cfg);
    save(out, "recovery_design3", "recovery_rate", "Exact recovery, d = b = 20");
    const double lo = find_row(out.rows, "sgl", cfg.n_grid.front(), "recovery_rate").value;
    const double hi = find_row(out.rows, "sgl", cfg.n_grid.back(), "recovery_rate").value;
    return {lo <= 0.05 && hi >= 0.95,
            "sgl rate " + fmt("%.2f", lo) + " at n=" + std::to_string(cfg.n_grid.front()) +
                ", " + fmt("%.2f", hi) + " at n=" + std::to_string(cfg.n_grid.back())};
}

// 5. Sparse group Lasso against the single-penalty baselines on 60 groups of 20.
Outcome method_ordering()
{
    const auto rcfg = config("recovery_design1.json");
    const auto rec = run_recovery_sweep(rcfg);
    save(rec, "recovery_design1", "recovery_rate", "Exact recovery, d = 60, b = 20");
    double worst_gap = -1.0;
    Index worst_n = 0;
    for (Index n : rcfg.n_grid) {
        const double s = find_row(rec.rows, "sgl", n, "recovery_rate").value;
        for (const char* base : {"lasso", "group-lasso"}) {
            const double gap = find_row(rec.rows, base, n, "recovery_rate").value - s;
            if (gap > worst_gap) {
                worst_gap = gap;
                worst_n = n;
            }
        }
    }

    auto ncfg = config("noisy_design1.json");
    ncfg.n_grid = {100, 150, 200};
    ncfg.methods = {Method::SglCv, Method::Lasso, Method::GroupLasso};
    const auto noisy = run_noisy_sweep(ncfg);
    save(noisy, "noisy_design1_cv", "mse", "Mean squared error, d = 60, b = 20");
    double worst_ratio = 0.0;
    std::string ratios;
    for (Index n : ncfg.n_grid) {
        const double s = find_row(noisy.rows, "sgl-cv", n, "mse").value;
        const double best = std::min(find_row(noisy.rows, "lasso", n, "mse").value,
                                     find_row(noisy.rows, "group-lasso", n, "mse").value);
        worst_ratio = std::max(worst_ratio, s / best);
        ratios += (ratios.empty() ? "" : " ") + fmt("%.3f", s / best);
    }
    return {worst_gap <= 0.1 && worst_ratio <= 1.2,
            "recovery: max(baseline - sgl) = " + fmt("%.2f", worst_gap) + " (n=" +
                std::to_string(worst_n) + "); noisy sgl-cv / best baseline at n=100,150,200: " +
                ratios};
}

// 6. Error halves when n doubles.
Outcome rate_scaling()
{
    auto cfg = config("noisy_design1.json");
    cfg.n_grid = {100, 200};
    cfg.methods = {Method::Sgl};
    const auto out = run_noisy_sweep(cfg);
    save(out, "noisy_design1_theory", "mse", "Theory lambda, d = 60, b = 20");
    const double a = find_row(out.rows, "sgl", 100, "mse").value;
    const double b = find_row(out.rows, "sgl", 200, "mse").value;
    const double ratio = a / b;
    return {ratio >= 1.5 && ratio <= 2.8,
            "C_lambda=" + fmt("%g", cfg.C_lambda) + ", mse(100)=" + fmt("%.4e", a) +
                ", mse(200)=" + fmt("%.4e", b) + ", ratio " + fmt("%.3f", ratio) +
                ", failures " + std::to_string(out.failures)};
}

// 7. Coverage and normality of the debiased estimator.
Outcome debiased_inference()
{
    const auto cfg = config("ci_coverage.json");
    const auto out = run_ci_coverage(cfg);
    save(out, "ci_coverage", "coverage_pooled", "Pooled coverage");
    const Index n = cfg.n_grid.front();
    const auto get = [&](const char* m) { return find_row(out.rows, "debiased-sgl", n, m).value; };
    const double cov = get("coverage_pooled");
    const double ks = get("ks_pvalue_active");
    return {cov >= 0.90 && cov <= 0.99 && ks > 0.01,
            "coverage " + fmt("%.4f", cov) + " (null " + fmt("%.4f", get("coverage_null")) +
                ", nonnull " + fmt("%.4f", get("coverage_nonnull")) + "), KS p " +
                fmt("%.3f", ks) + " on an active coordinate, C_lambda=" + fmt("%g", cfg.C_lambda)};
}

// 8. Variance lower bound in every inference run.
Outcome variance_bound()
{
    struct Variant
    {
        const char* label;
        std::function<void(ExperimentConfig&)> edit;
    };
    const std::vector<Variant> variants{
        {"default", [](ExperimentConfig&) {}},
        {"C=1", [](ExperimentConfig& c) { c.C_lambda = 1.0; }},
        {"scaled", [](ExperimentConfig& c) { c.sigma_mode = SigmaMode::Scaled; }},
        {"toeplitz n=200",
         [](ExperimentConfig& c) {
             c.design.covariance = CovarianceKind::Toeplitz;
             c.design.rho = 0.15;
             c.n_grid = {200};
         }},
    };
    double worst = INFINITY;
    int runs = 0;
    for (const auto& v : variants) {
        auto cfg = config("ci_coverage.json");
        cfg.replicates = 100;
        v.edit(cfg);
        const auto out = run_ci_coverage(cfg);
        const auto& row = find_row(out.rows, "debiased-sgl", cfg.n_grid.front(), "variance_bound_slack_min");
        worst = std::min(worst, row.value);
        runs += row.replicates;
    }
    return {worst >= -1e-6, std::to_string(runs) + " runs x 100 coordinates, min slack " +
                                fmt("%.3e", worst)};
}

// 9. Golfing certificate on 20 groups of 20 at n = 200, and rip_check
// against naive enumeration.
Outcome certificate_lab()
{
    auto cfg = config("cert_design3.json");
    cfg.n_grid = {200};
    const auto out = run_certificate_study(cfg);
    save(out, "cert_design3_n200", "pass_rate", "Golfing certificate, n = 200");
    const auto rate = [&](const char* m) { return find_row(out.rows, "golfing", 200, m).value; };
    const double pass = rate("pass_rate");

    std::mt19937_64 rng(909);
    std::normal_distribution<double> g;
    const std::vector<std::vector<Index>> layouts{{3, 3, 3, 3}, {4, 4, 4}, {2, 5, 5}, {1, 1, 4, 6}, {6, 6}};
    int cases = 0, agree = 0, ok_cases = 0;
    double worst_diff = 0.0;
    for (const auto& sizes : layouts) {
        const GroupPartition part(sizes);
        for (Index n : {6, 15, 60, 400}) {
            for (Index s2_g = 1; s2_g <= std::min<Index>(3, part.d()); ++s2_g) {
                for (Index s2 = s2_g; s2 <= std::min<Index>(6, part.p()); s2 += 2) {
                    Matrix X(n, part.p());
                    for (auto& v : X.reshaped()) v = g(rng);
                    const auto r = rip_check(X, part, s2, s2_g, RipMode::Exhaustive);
                    const auto ref = dsreg::testing::naive_rip(X, part, s2, s2_g);
                    const bool ref_ok = ref.lower >= 1.0 / 3.0 && ref.upper <= 5.0 / 3.0;
                    const double diff = std::max(std::abs(r.worst_lower - ref.lower),
                                                 std::abs(r.worst_upper - ref.upper));
                    worst_diff = std::max(worst_diff, diff);
                    agree += (r.ok == ref_ok && diff <= 1e-12);
                    ok_cases += ref_ok;
                    ++cases;
                }
            }
        }
    }
    const bool golf_ok = pass >= 0.9;
    const bool rip_ok = agree == cases;
    return {golf_ok && rip_ok,
            "golfing pass rate " + fmt("%.2f", pass) + " at n=200 (sigma_min " +
                fmt("%.2f", rate("sigma_min_rate")) + ", a " + fmt("%.2f", rate("cond_a_rate")) +
                ", b " + fmt("%.2f", rate("cond_b_rate")) + ", c " +
                fmt("%.2f", rate("cond_c_rate")) + "), need 0.90; rip_check agrees on " +
                std::to_string(agree) + "/" + std::to_string(cases) + " designs (" +
                std::to_string(ok_cases) + " ok), max constant gap " + fmt("%.1e", worst_diff)};
}

struct Criterion
{
    int id;
    const char* name;
    Outcome (*run)();
};

const Criterion criteria[] = {
    {1, "prox oracle equivalence", prox_oracle},
    {2, "soft-thresholding properties", soft_threshold_properties},
    {3, "solver correctness", solver_correctness},
    {4, "noiseless exact recovery", recovery_design3},
    {5, "method ordering", method_ordering},
    {6, "rate scaling", rate_scaling},
    {7, "debiased inference", debiased_inference},
    {8, "variance lower bound", variance_bound},
    {9, "certificate lab", certificate_lab},
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"dsreg acceptance suite"};
    int only = 0;
    app.add_option("--only", only, "Run a single criterion")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    int failed = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
