#include <dsreg/experiments.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include <dsreg/certificate.hpp>
#include <dsreg/error.hpp>
#include <dsreg/inference.hpp>
#include <dsreg/solvers.hpp>
#include <dsreg/stats.hpp>
#include <dsreg/tuning.hpp>

namespace dsreg {

namespace {

using nlohmann::json;

constexpr std::pair<ExperimentKind, const char*> kind_names[] = {
    {ExperimentKind::RecoverySweep, "recovery-sweep"},
    {ExperimentKind::NoisySweep, "noisy-sweep"},
    {ExperimentKind::CiCoverage, "ci-coverage"},
    {ExperimentKind::CertificateStudy, "certificate-study"},
};

constexpr std::pair<Method, const char*> method_names[] = {
    {Method::Sgl, "sgl"},     {Method::SglCv, "sgl-cv"},   {Method::Lasso, "lasso"},
    {Method::GroupLasso, "group-lasso"}, {Method::L1Min, "l1-min"}, {Method::L12Min, "l12-min"},
};

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// exception is rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t count, int threads, F&& body)
{
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(workers, count); ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// One solve in a sweep; failed marks an exception or divergence.
struct Trial
{
    double value = 0.0;
    bool failed = false;
    std::string note;
};

SweepRow summarize(const std::string& method, Index n, const std::string& metric,
                   const std::vector<Trial>& trials, bool failures_count_as_zero)
{
    std::vector<double> vals;
    for (const Trial& t : trials) {
        if (!t.failed) {
            vals.push_back(t.value);
        } else if (failures_count_as_zero) {
            vals.push_back(0.0);
        }
    }
    const MeanStderr ms = mean_stderr(vals);
    return SweepRow{method, n, metric, vals.empty() ? std::numeric_limits<double>::quiet_NaN() : ms.mean,
                    static_cast<int>(vals.size()), ms.stderr_};
}

void collect_failures(SweepOutcome& out, const std::string& method, Index n,
                      const std::vector<Trial>& trials)
{
    for (std::size_t k = 0; k < trials.size(); ++k) {
        ++out.attempts;
        if (trials[k].failed) {
            ++out.failures;
            out.log.push_back(method + " n=" + std::to_string(n) + " replicate=" + std::to_string(k) +
                              ": " + trials[k].note);
        }
    }
}

std::pair<Index, Index> true_sparsity(const Dataset& data)
{
    const SparsityPattern pat = sparsity_of(*data.beta_truth);
    return {pat.s(), pat.s_g()};
}

double group_ratio_of(const Dataset& data)
{
    const auto [s, s_g] = true_sparsity(data);
    if (s_g == 0) return 1.0;
    return std::sqrt(static_cast<double>(s) / static_cast<double>(s_g));
}

Trial finish(const SolverResult& fit, const Dataset& data, bool recovery, double tol)
{
    Trial t;
    if (fit.status == SolveStatus::Diverged) {
        t.failed = true;
        t.note = "solver diverged";
        return t;
    }
    const double err = (fit.beta_hat.values - data.beta_truth->values).norm();
    t.value = recovery ? (err <= tol ? 1.0 : 0.0) : err * err;
    return t;
}

template <class F>
Trial guarded(F&& f)
{
    try {
        return f();
    } catch (const std::exception& e) {
        Trial t;
        t.failed = true;
        t.note = e.what();
        return t;
    }
}

json load_json(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback)
{
    if (!j.contains(key) || j[key].is_null()) return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        throw InvalidInput(std::string("config: field '") + key + "' has the wrong type");
    }
}

} // namespace

std::string to_string(ExperimentKind k)
{
    for (auto [v, name] : kind_names)
        if (v == k) return name;
    return "unknown";
}

std::string to_string(Method m)
{
    for (auto [v, name] : method_names)
        if (v == m) return name;
    return "unknown";
}

ExperimentKind experiment_from_string(const std::string& s)
{
    for (auto [v, name] : kind_names)
        if (s == name) return v;
    throw InvalidInput("unknown experiment '" + s + "'");
}

Method method_from_string(const std::string& s)
{
    for (auto [v, name] : method_names)
        if (s == name) return v;
    throw InvalidInput("unknown method '" + s + "'");
}

std::vector<Index> default_n_grid()
{
    std::vector<Index> grid;
    for (int k = 0; k < 20; ++k) grid.push_back(5 + static_cast<Index>(std::lround(k * 195.0 / 19.0)));
    return grid;
}

void ExperimentConfig::validate() const
{
    design.validate();
    if (n_grid.empty()) throw InvalidInput("config: n_grid is empty");
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
        if (n_grid[k] < 1) throw InvalidInput("config: n_grid values must be >= 1");
        if (k > 0 && n_grid[k] <= n_grid[k - 1]) throw InvalidInput("config: n_grid must be ascending");
    }
    if (replicates < 1) throw InvalidInput("config: replicates must be >= 1");
    if (!(success_tol > 0)) throw InvalidInput("config: success_tol must be > 0");
    if (!(sigma >= 0)) throw InvalidInput("config: sigma must be >= 0");
    if (!(C_lambda > 0) || !(scaled_C_lambda > 0)) throw InvalidInput("config: C_lambda must be > 0");
    if (cv_folds < 2 || cv_grid_size < 1 || !(cv_grid_ratio > 0 && cv_grid_ratio < 1)) {
        throw InvalidInput("config: invalid cross-validation settings");
    }
    if (!(level > 0 && level < 1)) throw InvalidInput("config: level must lie in (0, 1)");
    if (!(failure_threshold >= 0 && failure_threshold <= 1)) {
        throw InvalidInput("config: failure_threshold must lie in [0, 1]");
    }
    if (threads < 1) throw InvalidInput("config: threads must be >= 1");
    if (methods.empty() && (experiment == ExperimentKind::RecoverySweep ||
                            experiment == ExperimentKind::NoisySweep)) {
        throw InvalidInput("config: methods is empty");
    }
    for (Method m : methods) {
        if (experiment == ExperimentKind::RecoverySweep && m == Method::SglCv) {
            throw InvalidInput("config: sgl-cv has no noiseless counterpart");
        }
        if (experiment == ExperimentKind::NoisySweep && (m == Method::L1Min || m == Method::L12Min)) {
            throw InvalidInput("config: " + to_string(m) + " needs noiseless data");
        }
    }
    if (experiment == ExperimentKind::RecoverySweep && sigma != 0.0) {
        throw InvalidInput("config: recovery-sweep requires sigma = 0");
    }
    if (experiment == ExperimentKind::CiCoverage && !(sigma > 0)) {
        throw InvalidInput("config: " + to_string(experiment) + " requires sigma > 0");
    }
}

ExperimentConfig config_from_json_text(const std::string& text)
{
    const json j = load_json(text);
    if (!j.is_object()) throw InvalidInput("config: top level must be an object");
    ExperimentConfig cfg;
    if (!j.contains("experiment")) throw InvalidInput("config: missing field 'experiment'");
    cfg.experiment = experiment_from_string(get_or<std::string>(j, "experiment", ""));
    cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
    cfg.sigma = get_or<double>(j, "sigma", cfg.experiment == ExperimentKind::RecoverySweep ||
                                                   cfg.experiment == ExperimentKind::CertificateStudy
                                               ? 0.0
                                               : 0.1);

    const json design = j.value("design", json::object());
    cfg.design.d = get_or<Index>(design, "d", 20);
    cfg.design.b = get_or<Index>(design, "b", 20);
    const auto cov = get_or<std::string>(design, "covariance", "identity");
    if (cov == "identity") {
        cfg.design.covariance = CovarianceKind::Identity;
    } else if (cov == "toeplitz") {
        cfg.design.covariance = CovarianceKind::Toeplitz;
    } else if (cov == "equicorrelation") {
        cfg.design.covariance = CovarianceKind::Equicorrelation;
    } else {
        throw InvalidInput("config: unknown covariance '" + cov + "'");
    }
    cfg.design.rho = get_or<double>(design, "rho", 0.0);
    const auto rows = get_or<std::string>(design, "rows", "gaussian");
    if (rows == "gaussian") {
        cfg.design.rows = RowLaw::Gaussian;
    } else if (rows == "rademacher") {
        cfg.design.rows = RowLaw::Rademacher;
    } else {
        throw InvalidInput("config: unknown row law '" + rows + "'");
    }
    cfg.design.kappa = get_or<double>(design, "kappa", 1.0);
    cfg.design.assumption1 = get_or<bool>(design, "assumption1", true);

    const json signal = j.value("signal", json::object());
    const auto kind = get_or<std::string>(signal, "kind", "paper-fixed");
    if (kind == "paper-fixed") {
        cfg.signal.kind = SignalKind::PaperFixed;
    } else if (kind == "random-sparse") {
        cfg.signal.kind = SignalKind::RandomSparse;
    } else {
        throw InvalidInput("config: unknown signal kind '" + kind + "'");
    }
    cfg.signal.s_g = get_or<Index>(signal, "s_g", 1);
    cfg.signal.s = get_or<Index>(signal, "s", cfg.signal.kind == SignalKind::PaperFixed ? 5 * cfg.signal.s_g : 5);
    if (signal.contains("amplitude")) {
        const json& a = signal["amplitude"];
        if (a.is_number()) {
            cfg.signal.amplitude_lo = cfg.signal.amplitude_hi = a.get<double>();
        } else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
            cfg.signal.amplitude_lo = a[0].get<double>();
            cfg.signal.amplitude_hi = a[1].get<double>();
        } else {
            throw InvalidInput("config: amplitude must be a number or a [lo, hi] pair");
        }
    }
    cfg.signal.seed = get_or<std::uint64_t>(signal, "seed", mix_seed(cfg.seed, 0x516));

    if (j.contains("n_grid")) {
        const json& g = j["n_grid"];
        if (g.is_array()) {
            cfg.n_grid = get_or<std::vector<Index>>(j, "n_grid", {});
        } else if (g.is_object()) {
            const auto from = get_or<Index>(g, "from", 5);
            const auto to = get_or<Index>(g, "to", 200);
            const auto points = get_or<int>(g, "points", 20);
            if (points < 1 || to < from) throw InvalidInput("config: invalid n_grid range");
            for (int k = 0; k < points; ++k) {
                const double t = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
                const auto n = from + static_cast<Index>(std::lround(t * static_cast<double>(to - from)));
                if (cfg.n_grid.empty() || n > cfg.n_grid.back()) cfg.n_grid.push_back(n);
            }
        } else {
            throw InvalidInput("config: n_grid must be a list or a {from, to, points} object");
        }
    } else {
        cfg.n_grid = default_n_grid();
    }
    cfg.replicates = get_or<int>(j, "replicates", cfg.experiment == ExperimentKind::NoisySweep ? 200 : 100);
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& m : get_or<std::vector<std::string>>(j, "methods", {})) {
            cfg.methods.push_back(method_from_string(m));
        }
    }
    cfg.success_tol = get_or<double>(j, "success_tol", 1e-4);
    cfg.output_dir = get_or<std::string>(j, "output_dir", ".");
    cfg.C_lambda = get_or<double>(j, "C_lambda", 1.0);
    cfg.cv_folds = get_or<int>(j, "cv_folds", 5);
    cfg.cv_grid_size = get_or<int>(j, "cv_grid_size", 30);
    cfg.cv_grid_ratio = get_or<double>(j, "cv_grid_ratio", 1e-3);
    cfg.level = get_or<double>(j, "level", 0.95);
    const auto mode = get_or<std::string>(j, "sigma_mode", "known");
    if (mode == "known") {
        cfg.sigma_mode = SigmaMode::Known;
    } else if (mode == "scaled") {
        cfg.sigma_mode = SigmaMode::Scaled;
    } else {
        throw InvalidInput("config: sigma_mode must be 'known' or 'scaled'");
    }
    cfg.scaled_C_lambda = get_or<double>(j, "scaled_C_lambda", 1.0);
    cfg.failure_threshold = get_or<double>(j, "failure_threshold", 0.05);
    cfg.threads = get_or<int>(j, "threads", 1);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

std::uint64_t replicate_seed(std::uint64_t seed, Index n, int k)
{
    return mix_seed(mix_seed(seed, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(k));
}

Dataset draw_replicate(const ExperimentConfig& cfg, Index n, int k, double sigma)
{
    const std::uint64_t base = replicate_seed(cfg.seed, n, k);
    DesignSpec design = cfg.design;
    design.n = n;
    design.seed = mix_seed(base, 1);
    return simulate(design, cfg.signal, sigma, mix_seed(base, 2));
}

SweepOutcome run_recovery_sweep(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.experiment != ExperimentKind::RecoverySweep) {
        throw InvalidInput("run_recovery_sweep: config is for " + to_string(cfg.experiment));
    }
    SweepOutcome out;
    const auto reps = static_cast<std::size_t>(cfg.replicates);
    for (Index n : cfg.n_grid) {
        // trials[method][replicate]; every method sees the same draw.
        std::vector<std::vector<Trial>> trials(cfg.methods.size(), std::vector<Trial>(reps));
        parallel_for(reps, cfg.threads, [&](std::size_t k) {
            const Dataset data = draw_replicate(cfg, n, static_cast<int>(k), 0.0);
            for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
                trials[m][k] = guarded([&] {
                    SolverResult fit;
                    switch (cfg.methods[m]) {
                    case Method::Sgl: fit = solve_noiseless(data, group_ratio_of(data)); break;
                    case Method::Lasso:
                    case Method::L1Min: fit = solve_l1_min(data); break;
                    case Method::GroupLasso:
                    case Method::L12Min: fit = solve_l12_min(data); break;
                    case Method::SglCv: throw InvalidInput("sgl-cv is not a noiseless method");
                    }
                    return finish(fit, data, true, cfg.success_tol);
                });
            }
        });
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            const auto name = to_string(cfg.methods[m]);
            out.rows.push_back(summarize(name, n, "recovery_rate", trials[m], true));
            collect_failures(out, name, n, trials[m]);
        }
    }
    return out;
}

SweepOutcome run_noisy_sweep(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.experiment != ExperimentKind::NoisySweep) {
        throw InvalidInput("run_noisy_sweep: config is for " + to_string(cfg.experiment));
    }
    SweepOutcome out;
    const auto reps = static_cast<std::size_t>(cfg.replicates);
    for (Index n : cfg.n_grid) {
        std::vector<std::vector<Trial>> trials(cfg.methods.size(), std::vector<Trial>(reps));
        parallel_for(reps, cfg.threads, [&](std::size_t k) {
            const Dataset data = draw_replicate(cfg, n, static_cast<int>(k), cfg.sigma);
            const std::uint64_t cv_seed = mix_seed(replicate_seed(cfg.seed, n, static_cast<int>(k)), 3);
            const double ratio = group_ratio_of(data);
            auto cv_fit = [&](PenaltyShape shape) {
                const auto grid = default_lambda_grid(data, shape, cfg.cv_grid_size, cfg.cv_grid_ratio);
                const CvOutcome cv = cv_path(data, grid, shape, cfg.cv_folds, cv_seed);
                return solve_sgl(data, cv.lambda_best, cv.lambda_g_best);
            };
            for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
                trials[m][k] = guarded([&] {
                    SolverResult fit;
                    switch (cfg.methods[m]) {
                    case Method::Sgl: {
                        const auto [s, s_g] = true_sparsity(data);
                        // The theory lambda vanishes with sigma; its limit is the constrained fit.
                        if (cfg.sigma == 0.0) {
                            fit = solve_noiseless(data, ratio);
                            break;
                        }
                        const Lambdas l = default_lambdas(cfg.sigma, n, cfg.design.d, cfg.design.b,
                                                          s, s_g, cfg.C_lambda);
                        fit = solve_sgl(data, l.lambda, l.lambda_g);
                        break;
                    }
                    case Method::SglCv: fit = cv_fit({1.0, ratio}); break;
                    case Method::Lasso: fit = cv_fit({1.0, 0.0}); break;
                    case Method::GroupLasso: fit = cv_fit({0.0, 1.0}); break;
                    case Method::L1Min:
                    case Method::L12Min: throw InvalidInput("noiseless method in a noisy sweep");
                    }
                    return finish(fit, data, false, cfg.success_tol);
                });
            }
        });
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            const auto name = to_string(cfg.methods[m]);
            out.rows.push_back(summarize(name, n, "mse", trials[m], false));
            collect_failures(out, name, n, trials[m]);
        }
    }
    return out;
}

SweepOutcome run_ci_coverage(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.experiment != ExperimentKind::CiCoverage) {
        throw InvalidInput("run_ci_coverage: config is for " + to_string(cfg.experiment));
    }
    const std::string method = "debiased-sgl";
    SweepOutcome out;
    const auto reps = static_cast<std::size_t>(cfg.replicates);
    for (Index n : cfg.n_grid) {
        struct Rep
        {
            bool failed = false;
            std::string note;
            double covered_null = 0, total_null = 0, covered_active = 0, total_active = 0;
            double width = 0.0;
            double sigma_ratio = 0.0;
            double slack = 0.0;
            double z_active = 0.0; // first active coordinate
            double z_null = 0.0;   // first null coordinate
        };
        std::vector<Rep> results(reps);
        parallel_for(reps, cfg.threads, [&](std::size_t k) {
            Rep& rep = results[k];
            try {
                const Dataset data = draw_replicate(cfg, n, static_cast<int>(k), cfg.sigma);
                const auto [s, s_g] = true_sparsity(data);
                if (s == 0) throw InvalidInput("ci-coverage needs a nonzero signal");
                const Lambdas l = default_lambdas(cfg.sigma, n, cfg.design.d, cfg.design.b, s, s_g, cfg.C_lambda);
                const SolverResult fit = solve_sgl(data, l.lambda, l.lambda_g);
                if (fit.status == SolveStatus::Diverged) throw std::runtime_error("solver diverged");
                double sigma_hat = cfg.sigma;
                if (cfg.sigma_mode == SigmaMode::Scaled) {
                    const Lambdas lt = default_lambdas(1.0, n, cfg.design.d, cfg.design.b, s, s_g,
                                                       cfg.scaled_C_lambda);
                    sigma_hat = solve_scaled_sgl(data, lt.lambda, lt.lambda_g).sigma_hat;
                }
                const InferenceThresholds th = inference_thresholds(l.lambda, n, cfg.sigma, s, s_g);
                const Matrix S = sample_covariance(data.X);
                const Matrix M = estimate_M(S, data.partition, th.alpha, th.gamma);
                const DebiasResult dr = debias(data, fit.beta_hat, M, th.alpha, th.gamma);
                const auto cis = confidence_intervals(dr, sigma_hat, cfg.level, n);
                const Vector& truth = data.beta_truth->values;
                bool have_active = false;
                bool have_null = false;
                const double sqn = std::sqrt(static_cast<double>(n));
                for (const auto& ci : cis) {
                    const double t = truth[ci.index];
                    const bool hit = ci.lo <= t && t <= ci.hi;
                    const double z = sqn * (dr.beta_u.values[ci.index] - t) /
                                     (cfg.sigma * std::sqrt(dr.variances[ci.index]));
                    if (t != 0.0) {
                        rep.covered_active += hit;
                        rep.total_active += 1;
                        if (!have_active) rep.z_active = z;
                        have_active = true;
                    } else {
                        rep.covered_null += hit;
                        rep.total_null += 1;
                        if (!have_null) rep.z_null = z;
                        have_null = true;
                    }
                    rep.width += (ci.hi - ci.lo) / static_cast<double>(cis.size());
                }
                rep.sigma_ratio = sigma_hat / cfg.sigma;
                rep.slack = variance_bound_slack(dr, S);
            } catch (const std::exception& e) {
                rep.failed = true;
                rep.note = e.what();
            }
        });

        double cn = 0, tn = 0, ca = 0, ta = 0;
        std::vector<double> width, ratio, za, zn;
        double worst_slack = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < reps; ++k) {
            const Rep& r = results[k];
            ++out.attempts;
            if (r.failed) {
                ++out.failures;
                out.log.push_back(method + " n=" + std::to_string(n) + " replicate=" + std::to_string(k) + ": " + r.note);
                continue;
            }
            cn += r.covered_null;
            tn += r.total_null;
            ca += r.covered_active;
            ta += r.total_active;
            width.push_back(r.width);
            ratio.push_back(r.sigma_ratio);
            za.push_back(r.z_active);
            if (r.total_null > 0) zn.push_back(r.z_null);
            worst_slack = std::min(worst_slack, r.slack);
        }
        const int ok = static_cast<int>(width.size());
        auto prop = [&](const std::string& metric, double hits, double total) {
            const double v = total > 0 ? hits / total : std::numeric_limits<double>::quiet_NaN();
            const double se = total > 0 ? std::sqrt(v * (1 - v) / total) : 0.0;
            out.rows.push_back({method, n, metric, v, ok, se});
        };
        prop("coverage_pooled", cn + ca, tn + ta);
        prop("coverage_null", cn, tn);
        prop("coverage_nonnull", ca, ta);
        const auto w = mean_stderr(width);
        out.rows.push_back({method, n, "mean_width", w.mean, ok, w.stderr_});
        const auto sr = mean_stderr(ratio);
        out.rows.push_back({method, n, "sigma_hat_ratio", sr.mean, ok, sr.stderr_});
        out.rows.push_back({method, n, "variance_bound_slack_min", ok ? worst_slack : std::numeric_limits<double>::quiet_NaN(), ok, 0.0});
        const auto ma = mean_stderr(za);
        out.rows.push_back({method, n, "z_active_mean", ma.mean, ok, ma.stderr_});
        out.rows.push_back({method, n, "ks_pvalue_active", za.empty() ? std::numeric_limits<double>::quiet_NaN() : ks_test_normal(za).p_value, ok, 0.0});
        out.rows.push_back({method, n, "ks_pvalue_null", zn.empty() ? std::numeric_limits<double>::quiet_NaN() : ks_test_normal(zn).p_value, static_cast<int>(zn.size()), 0.0});
    }
    return out;
}

SweepOutcome run_certificate_study(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.experiment != ExperimentKind::CertificateStudy) {
        throw InvalidInput("run_certificate_study: config is for " + to_string(cfg.experiment));
    }
    const std::string method = "golfing";
    SweepOutcome out;
    const auto reps = static_cast<std::size_t>(cfg.replicates);
    for (Index n : cfg.n_grid) {
        // pass, sigma_min, cond_a, cond_b, cond_c
        std::vector<std::array<double, 5>> flags(reps);
        std::vector<std::string> notes(reps);
        parallel_for(reps, cfg.threads, [&](std::size_t k) {
            const Dataset data = draw_replicate(cfg, n, static_cast<int>(k), cfg.sigma);
            const SparsityPattern pat = sparsity_of(*data.beta_truth);
            try {
                const auto batches = golfing_batches(n, std::max<Index>(pat.s(), 1));
                const GolfingResult g = golfing_construct(data, data.Sigma, pat, *data.beta_truth, batches);
                const CertificateReport rep = certificate_verify(data, pat, *data.beta_truth, g.u);
                flags[k] = {double(rep.passed()), double(rep.sigma_min.ok), double(rep.cond_a.ok),
                            double(rep.cond_b.ok), double(rep.cond_c.ok)};
            } catch (const InvalidInput& e) {
                // Too few rows for the batch schedule: the certificate does not exist.
                flags[k] = {0, 0, 0, 0, 0};
                notes[k] = e.what();
            }
        });
        static const char* names[] = {"pass_rate", "sigma_min_rate", "cond_a_rate", "cond_b_rate", "cond_c_rate"};
        for (std::size_t c = 0; c < 5; ++c) {
            std::vector<double> v(reps);
            for (std::size_t k = 0; k < reps; ++k) v[k] = flags[k][c];
            const auto ms = mean_stderr(v);
            out.rows.push_back({method, n, names[c], ms.mean, static_cast<int>(reps), ms.stderr_});
        }
        out.attempts += reps;
        for (std::size_t k = 0; k < reps; ++k) {
            if (notes[k].empty()) continue;
            ++out.failures;
            out.log.push_back(method + " n=" + std::to_string(n) + " replicate " + std::to_string(k) + ": " + notes[k]);
        }
    }
    return out;
}

SweepOutcome run_experiment(const ExperimentConfig& cfg)
{
    switch (cfg.experiment) {
    case ExperimentKind::RecoverySweep: return run_recovery_sweep(cfg);
    case ExperimentKind::NoisySweep: return run_noisy_sweep(cfg);
    case ExperimentKind::CiCoverage: return run_ci_coverage(cfg);
    case ExperimentKind::CertificateStudy: return run_certificate_study(cfg);
    }
    throw InvalidInput("unknown experiment");
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << "method,n,metric,value,replicates,stderr\n";
    char buf[256];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%ld,%s,%.17g,%d,%.17g\n", r.method.c_str(),
                      static_cast<long>(r.n), r.metric.c_str(), r.value, r.replicates, r.stderr_);
        os << buf;
    }
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("read_sweep_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "method,n,metric,value,replicates,stderr") {
        throw InvalidInput("read_sweep_csv: unexpected header in " + path.string());
    }
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 6) throw InvalidInput("read_sweep_csv: malformed line '" + line + "'");
        try {
            rows.push_back({f[0], std::stol(f[1]), f[2], std::stod(f[3]), std::stoi(f[4]), std::stod(f[5])});
        } catch (const std::exception&) {
            throw InvalidInput("read_sweep_csv: malformed line '" + line + "'");
        }
    }
    return rows;
}

const SweepRow& find_row(const std::vector<SweepRow>& rows, const std::string& method, Index n,
                         const std::string& metric)
{
    for (const SweepRow& r : rows)
        if (r.method == method && r.n == n && r.metric == metric) return r;
    throw InvalidInput("no row for " + method + " n=" + std::to_string(n) + " " + metric);
}

} // namespace dsreg
