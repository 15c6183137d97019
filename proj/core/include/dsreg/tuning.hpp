#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <dsreg/dataset.hpp>
#include <dsreg/solvers.hpp>

namespace dsreg {

struct TuningSpec
{
    double C_lambda = 1.0;
    /// Sparsity levels used for the ratio lambda_g / lambda = sqrt(s / s_g).
    Index s_target = 5;
    Index s_g_target = 1;
    int cv_folds = 5;
    /// Candidate lambda values, strictly positive and sorted descending.
    /// Empty means default_lambda_grid(data).
    std::vector<double> grid;
    std::uint64_t seed = 0;

    void validate() const;
    double group_ratio() const;
};

struct Lambdas
{
    double lambda = 0.0;
    double lambda_g = 0.0;
};

/**
 * lambda   = C sigma sqrt((s log(e s_g b) + s_g log(e d / s_g)) n / s)
 * lambda_g = sqrt(s / s_g) lambda
 *
 * Scaled for the unnormalized loss ||y - X beta||^2. Throws InvalidInput for
 * zero counts, s_g > s, s_g > d or non-positive sigma / C.
 */
Lambdas default_lambdas(double sigma, Index n, Index d, Index b, Index s, Index s_g,
                        double C_lambda = 1.0);

/// Penalty levels as multiples of the grid value: (w_elem lambda, w_group lambda).
struct PenaltyShape
{
    double w_elem = 1.0;
    double w_group = 1.0;
};

/// count log-spaced values from 2 ||X^T y||_inf down to ratio times that.
std::vector<double> default_lambda_grid(const Dataset& data, int count = 30, double ratio = 1e-3);
/// Same spacing, starting at 2 ||X^T y||_inf / w_elem, or at
/// 2 ||X^T y||_{inf,2} / w_group for a pure group penalty.
std::vector<double> default_lambda_grid(const Dataset& data, PenaltyShape shape, int count = 30,
                                        double ratio = 1e-3);

struct CvRow
{
    double lambda = 0.0;
    int fold_id = 0;
    double mse = 0.0;
};

struct CvOutcome
{
    double lambda_best = 0.0;
    double lambda_g_best = 0.0;
    /// One row per (grid value, fold), grid-major.
    std::vector<CvRow> table;
    /// Mean held-out error per grid value.
    std::vector<double> mean_mse;
    std::vector<double> grid;
};

/// Fold label in [0, K) for each of n rows: a seeded shuffle dealt round-robin.
std::vector<int> cv_fold_labels(Index n, int folds, std::uint64_t seed);

/**
 * K-fold cross-validation over a descending grid for the penalty
 * (w_elem lambda) ||.||_1 + (w_group lambda) ||.||_{1,2}. Each fold walks the
 * grid with warm starts. The minimizer of the mean held-out squared
 * prediction error wins; ties go to the larger lambda.
 */
CvOutcome cv_path(const Dataset& data, const std::vector<double>& grid, PenaltyShape shape,
                  int folds, std::uint64_t seed, const SolveOptions& opts = {});

/// cv_path with shape (1, sqrt(s_target / s_g_target)).
CvOutcome cv_select(const Dataset& data, const TuningSpec& spec, const SolveOptions& opts = {});

/// CSV with header lambda,fold_id,mse.
void write_cv_table(std::ostream& os, const std::vector<CvRow>& table);

} // namespace dsreg
