#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <dsreg/dataset.hpp>
#include <dsreg/simgen.hpp>

namespace dsreg {

enum class ExperimentKind { RecoverySweep, NoisySweep, CiCoverage, CertificateStudy };
enum class Method { Sgl, SglCv, Lasso, GroupLasso, L1Min, L12Min };
enum class SigmaMode { Known, Scaled };

std::string to_string(ExperimentKind k);
std::string to_string(Method m);
ExperimentKind experiment_from_string(const std::string& s);
Method method_from_string(const std::string& s);

/**
 * One experiment. In the noiseless sweep "sgl" is the constrained
 * l1 + sqrt(s/s_g) l_{1,2} minimization, "lasso"/"l1-min" the l1 one and
 * "group-lasso"/"l12-min" the l_{1,2} one. In the noisy sweep "sgl" uses the
 * theory lambda with C_lambda and the true sigma (the constrained fit when
 * sigma = 0); the other penalized methods are tuned by cross-validation.
 */
struct ExperimentConfig
{
    ExperimentKind experiment = ExperimentKind::RecoverySweep;
    DesignSpec design;
    SignalSpec signal;
    std::vector<Index> n_grid;
    int replicates = 100;
    std::vector<Method> methods{Method::Sgl};
    double success_tol = 1e-4;
    std::uint64_t seed = 0;
    std::string output_dir = ".";

    double sigma = 0.1;
    double C_lambda = 1.0;
    int cv_folds = 5;
    int cv_grid_size = 30;
    double cv_grid_ratio = 1e-3;
    double level = 0.95;
    SigmaMode sigma_mode = SigmaMode::Known;
    /// Constant of the theory lambda used by the scaled noise estimate.
    double scaled_C_lambda = 1.0;
    /// Exit with status 3 when more than this fraction of solves fail.
    double failure_threshold = 0.05;
    int threads = 1;

    void validate() const;
};

/// n values 5, ..., 200 on 20 evenly spaced integer points.
std::vector<Index> default_n_grid();

/// Parses the JSON config format; throws InvalidInput on missing or bad fields.
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct SweepRow
{
    std::string method;
    Index n = 0;
    std::string metric;
    double value = 0.0;
    int replicates = 0;
    double stderr_ = 0.0;
};

struct SweepOutcome
{
    std::vector<SweepRow> rows;
    std::size_t attempts = 0;
    std::size_t failures = 0;
    /// One line per failed solve.
    std::vector<std::string> log;

    double failure_fraction() const
    {
        return attempts == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(attempts);
    }
};

/// Seed of replicate k at sample size n; the draw depends on nothing else.
std::uint64_t replicate_seed(std::uint64_t seed, Index n, int k);

/// The dataset of replicate k at sample size n (same for every method).
Dataset draw_replicate(const ExperimentConfig& cfg, Index n, int k, double sigma);

SweepOutcome run_recovery_sweep(const ExperimentConfig& cfg);
SweepOutcome run_noisy_sweep(const ExperimentConfig& cfg);
SweepOutcome run_ci_coverage(const ExperimentConfig& cfg);
SweepOutcome run_certificate_study(const ExperimentConfig& cfg);
SweepOutcome run_experiment(const ExperimentConfig& cfg);

/// Header method,n,metric,value,replicates,stderr.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

/// Rows matching (method, n, metric); throws InvalidInput if absent.
const SweepRow& find_row(const std::vector<SweepRow>& rows, const std::string& method, Index n,
                         const std::string& metric);

} // namespace dsreg
