// dsreg command-line front end.
//
// Exit codes: 0 success, 2 bad arguments or config, 3 too many solver
// failures in an experiment, 1 anything else.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <dsreg/certificate.hpp>
#include <dsreg/dataset.hpp>
#include <dsreg/error.hpp>
#include <dsreg/experiments.hpp>
#include <dsreg/inference.hpp>
#include <dsreg/plot.hpp>
#include <dsreg/simgen.hpp>
#include <dsreg/solvers.hpp>
#include <dsreg/tuning.hpp>

namespace fs = std::filesystem;
using namespace dsreg;

namespace {

constexpr int exit_config = 2;
constexpr int exit_failures = 3;

struct Globals
{
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string out;
};

struct GenArgs
{
    Index n = 100, d = 20, b = 20, s = 5, s_g = 1;
    double sigma = 0.1;
    std::string signal = "paper-fixed";
    std::string covariance = "identity";
    double rho = 0.0;
    std::string stem = "data";
};

struct SolveArgs
{
    std::string data;
    std::string method = "sgl";
    std::optional<double> lambda;
    std::optional<double> lambda_g;
    double C_lambda = 1.0;
    std::optional<double> sigma;
    std::optional<Index> s;
    std::optional<Index> s_g;
    std::optional<double> ci_level;
};

struct PlotArgs
{
    std::string csv;
    std::string metric;
    std::string title;
};

void write_vector_csv(const fs::path& path, const Vector& v)
{
    Matrix m = v;
    write_csv_matrix(path, m);
}

std::pair<Index, Index> sparsity_hint(const Dataset& data, const SolveArgs& a)
{
    if (a.s && a.s_g) return {*a.s, *a.s_g};
    if (data.beta_truth) {
        const auto pat = sparsity_of(*data.beta_truth);
        return {a.s.value_or(pat.s()), a.s_g.value_or(pat.s_g())};
    }
    throw InvalidInput("--s and --s-g are required when the dataset has no true beta");
}

int run_gen(const GenArgs& a, const Globals& g)
{
    DesignSpec design;
    design.n = a.n;
    design.d = a.d;
    design.b = a.b;
    design.rho = a.rho;
    if (a.covariance == "identity") {
        design.covariance = CovarianceKind::Identity;
    } else if (a.covariance == "toeplitz") {
        design.covariance = CovarianceKind::Toeplitz;
    } else if (a.covariance == "equicorrelation") {
        design.covariance = CovarianceKind::Equicorrelation;
    } else {
        throw InvalidInput("unknown covariance '" + a.covariance + "'");
    }
    const std::uint64_t seed = g.seed.value_or(0);
    design.seed = mix_seed(seed, 1);
    SignalSpec signal;
    signal.kind = a.signal == "random-sparse" ? SignalKind::RandomSparse : SignalKind::PaperFixed;
    if (a.signal != "random-sparse" && a.signal != "paper-fixed") {
        throw InvalidInput("unknown signal kind '" + a.signal + "'");
    }
    signal.s = a.s;
    signal.s_g = a.s_g;
    signal.seed = mix_seed(seed, 3);
    Dataset data = simulate(design, signal, a.sigma, mix_seed(seed, 2));
    const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
    fs::create_directories(dir);
    save_dataset(data, dir, a.stem);
    std::cout << (dir / (a.stem + ".json")).string() << '\n';
    return 0;
}

int run_solve(const SolveArgs& a, const Globals& g)
{
    const Dataset data = load_dataset(a.data);
    nlohmann::json report;
    report["method"] = a.method;
    SolverResult fit;
    std::optional<double> sigma_hat;
    double lambda_used = 0.0;
    const double sigma = a.sigma.value_or(data.sigma_truth.value_or(0.0));

    if (a.method == "sgl") {
        if (a.lambda && a.lambda_g) {
            fit = solve_sgl(data, *a.lambda, *a.lambda_g);
            lambda_used = *a.lambda;
        } else {
            const auto [s, s_g] = sparsity_hint(data, a);
            if (!(sigma > 0)) throw InvalidInput("--sigma is required for the theory lambda");
            const Lambdas l = default_lambdas(sigma, data.n(), data.partition.d(), data.partition.max_size(),
                                              s, s_g, a.C_lambda);
            fit = solve_sgl(data, l.lambda, l.lambda_g);
            lambda_used = l.lambda;
        }
    } else if (a.method == "sgl-cv") {
        const auto [s, s_g] = sparsity_hint(data, a);
        TuningSpec spec;
        spec.s_target = s;
        spec.s_g_target = s_g;
        spec.seed = g.seed.value_or(0);
        const CvOutcome cv = cv_select(data, spec);
        fit = solve_sgl(data, cv.lambda_best, cv.lambda_g_best);
        lambda_used = cv.lambda_best;
        if (!g.out.empty()) {
            fs::create_directories(g.out);
            std::ofstream os(fs::path(g.out) / "cv_table.csv");
            write_cv_table(os, cv.table);
        }
    } else if (a.method == "lasso") {
        if (!a.lambda) throw InvalidInput("--lambda is required for lasso");
        fit = solve_lasso(data, *a.lambda);
        lambda_used = *a.lambda;
    } else if (a.method == "group-lasso") {
        if (!a.lambda_g) throw InvalidInput("--lambda-g is required for group-lasso");
        fit = solve_group_lasso(data, *a.lambda_g);
    } else if (a.method == "noiseless") {
        const auto [s, s_g] = sparsity_hint(data, a);
        fit = solve_noiseless(data, std::sqrt(static_cast<double>(s) / static_cast<double>(s_g)));
    } else if (a.method == "l1-min") {
        fit = solve_l1_min(data);
    } else if (a.method == "l12-min") {
        fit = solve_l12_min(data);
    } else if (a.method == "scaled") {
        const auto [s, s_g] = sparsity_hint(data, a);
        const Lambdas l = default_lambdas(1.0, data.n(), data.partition.d(), data.partition.max_size(), s,
                                          s_g, a.C_lambda);
        const ScaledResult r = solve_scaled_sgl(data, l.lambda, l.lambda_g);
        fit = r.fit;
        sigma_hat = r.sigma_hat;
        report["sigma_floored"] = r.sigma_floored;
        lambda_used = r.sigma_hat * l.lambda;
    } else {
        throw InvalidInput("unknown method '" + a.method + "'");
    }

    report["status"] = std::string(to_string(fit.status));
    report["objective"] = fit.objective;
    report["iters"] = fit.iters;
    report["kkt_residual"] = fit.kkt_residual;
    report["feasibility_residual"] = fit.feasibility_residual;
    if (sigma_hat) report["sigma_hat"] = *sigma_hat;
    const auto pat = sparsity_of(fit.beta_hat, solver_zero_tol);
    report["support_size"] = pat.s();
    report["active_groups"] = pat.s_g();
    if (data.beta_truth) report["error_l2"] = (fit.beta_hat.values - data.beta_truth->values).norm();

    if (!g.out.empty()) {
        fs::create_directories(g.out);
        write_vector_csv(fs::path(g.out) / "beta_hat.csv", fit.beta_hat.values);
    }

    if (a.ci_level) {
        const auto [s, s_g] = sparsity_hint(data, a);
        const double sig = sigma_hat.value_or(sigma);
        if (!(sig > 0) || !(lambda_used > 0)) {
            throw InvalidInput("confidence intervals need sigma (--sigma or method scaled) and a lambda");
        }
        const InferenceThresholds th = inference_thresholds(lambda_used, data.n(), sig, s, s_g);
        const Matrix S = sample_covariance(data.X);
        const Matrix M = estimate_M(S, data.partition, th.alpha, th.gamma, {}, g.threads);
        const DebiasResult dr = debias(data, fit.beta_hat, M, th.alpha, th.gamma);
        const auto cis = confidence_intervals(dr, sig, *a.ci_level, data.n());
        std::optional<Vector> truth;
        if (data.beta_truth) truth = data.beta_truth->values;
        if (g.out.empty()) {
            write_ci_csv(std::cout, cis, truth);
        } else {
            std::ofstream os(fs::path(g.out) / "ci.csv");
            write_ci_csv(os, cis, truth);
        }
        report["alpha_thr"] = th.alpha;
        report["gamma_thr"] = th.gamma;
    }
    std::cout << report.dump(2) << '\n';
    return 0;
}

int run_sweep(ExperimentKind kind, const std::string& config_path, const Globals& g)
{
    ExperimentConfig cfg = load_config(config_path);
    if (cfg.experiment != kind) {
        throw InvalidInput("config describes " + to_string(cfg.experiment) + ", not " + to_string(kind));
    }
    if (g.seed) cfg.seed = *g.seed;
    cfg.threads = g.threads;
    if (!g.out.empty()) cfg.output_dir = g.out;
    cfg.validate();

    const SweepOutcome outcome = run_experiment(cfg);
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    const std::string stem = to_string(kind);
    {
        std::ofstream os(dir / (stem + ".csv"), std::ios::binary);
        write_sweep_csv(os, outcome.rows);
    }
    PlotSpec spec;
    switch (kind) {
    case ExperimentKind::RecoverySweep: spec.metric = "recovery_rate"; spec.title = "Exact recovery rate, noiseless"; break;
    case ExperimentKind::NoisySweep: spec.metric = "mse"; spec.title = "Mean squared estimation error"; break;
    case ExperimentKind::CiCoverage: spec.metric = "coverage_pooled"; spec.title = "Pooled CI coverage"; break;
    case ExperimentKind::CertificateStudy: spec.metric = "pass_rate"; spec.title = "Golfing certificate pass rate"; break;
    }
    write_plot(dir / (stem + ".svg"), outcome.rows, spec);
    for (const auto& line : outcome.log) std::cerr << "failure: " << line << '\n';
    std::cout << (dir / (stem + ".csv")).string() << '\n';
    if (outcome.failure_fraction() > cfg.failure_threshold) {
        std::cerr << "solver failures: " << outcome.failures << " of " << outcome.attempts << '\n';
        return exit_failures;
    }
    return 0;
}

int run_plot(const PlotArgs& a, const Globals& g)
{
    const auto rows = read_sweep_csv(a.csv);
    PlotSpec spec;
    spec.metric = a.metric;
    spec.title = a.title;
    const std::string svg = emit_plot(rows, spec);
    if (g.out.empty()) {
        std::cout << svg;
    } else {
        std::ofstream os(g.out, std::ios::binary);
        os << svg;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse group Lasso: solvers, inference and simulation studies"};
    app.require_subcommand(1);
    // Global flags may appear after the subcommand name.
    app.fallthrough();
    Globals g;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output directory (or file for plot)");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Simulate a dataset and write CSV + JSON");
    gen_cmd->add_option("--n", gen.n)->check(CLI::PositiveNumber);
    gen_cmd->add_option("--d", gen.d)->check(CLI::PositiveNumber);
    gen_cmd->add_option("--b", gen.b)->check(CLI::PositiveNumber);
    gen_cmd->add_option("--s", gen.s);
    gen_cmd->add_option("--s-g", gen.s_g);
    gen_cmd->add_option("--sigma", gen.sigma);
    gen_cmd->add_option("--signal", gen.signal, "paper-fixed or random-sparse");
    gen_cmd->add_option("--covariance", gen.covariance, "identity, toeplitz or equicorrelation");
    gen_cmd->add_option("--rho", gen.rho);
    gen_cmd->add_option("--stem", gen.stem, "File name stem");

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "Fit one dataset");
    solve_cmd->add_option("data", solve.data, "Dataset JSON sidecar")->required();
    solve_cmd->add_option("--method", solve.method,
                          "sgl, sgl-cv, lasso, group-lasso, noiseless, l1-min, l12-min, scaled");
    solve_cmd->add_option("--lambda", solve.lambda);
    solve_cmd->add_option("--lambda-g", solve.lambda_g);
    solve_cmd->add_option("--C", solve.C_lambda, "Theory lambda constant");
    solve_cmd->add_option("--sigma", solve.sigma, "Noise level for the theory lambda");
    solve_cmd->add_option("--s", solve.s);
    solve_cmd->add_option("--s-g", solve.s_g);
    solve_cmd->add_option("--ci", solve.ci_level, "Also write debiased confidence intervals at this level");

    std::string config;
    auto* rec_cmd = app.add_subcommand("recovery-sweep", "Noiseless exact-recovery sweep");
    auto* noisy_cmd = app.add_subcommand("noisy-sweep", "Noisy estimation-error sweep");
    auto* ci_cmd = app.add_subcommand("ci-coverage", "Debiased confidence interval coverage");
    auto* cert_cmd = app.add_subcommand("cert-study", "Golfing certificate pass rates");
    for (auto* cmd : {rec_cmd, noisy_cmd, ci_cmd, cert_cmd}) {
        cmd->add_option("config", config, "Experiment JSON config")->required();
    }

    PlotArgs plot;
    auto* plot_cmd = app.add_subcommand("plot", "Render a sweep CSV as SVG");
    plot_cmd->add_option("csv", plot.csv)->required();
    plot_cmd->add_option("--metric", plot.metric)->required();
    plot_cmd->add_option("--title", plot.title);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }
    if (*seed_opt) g.seed = seed;

    try {
        if (*gen_cmd) return run_gen(gen, g);
        if (*solve_cmd) return run_solve(solve, g);
        if (*rec_cmd) return run_sweep(ExperimentKind::RecoverySweep, config, g);
        if (*noisy_cmd) return run_sweep(ExperimentKind::NoisySweep, config, g);
        if (*ci_cmd) return run_sweep(ExperimentKind::CiCoverage, config, g);
        if (*cert_cmd) return run_sweep(ExperimentKind::CertificateStudy, config, g);
        if (*plot_cmd) return run_plot(plot, g);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
