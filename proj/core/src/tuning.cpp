#include <dsreg/tuning.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include <dsreg/error.hpp>
#include <dsreg/simgen.hpp>

namespace dsreg {

void TuningSpec::validate() const
{
    if (!(C_lambda > 0)) throw InvalidInput("TuningSpec: C_lambda must be > 0");
    if (s_target < 1 || s_g_target < 1 || s_g_target > s_target) {
        throw InvalidInput("TuningSpec: need 1 <= s_g_target <= s_target");
    }
    if (cv_folds < 2) throw InvalidInput("TuningSpec: cv_folds must be >= 2");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] > 0) || !std::isfinite(grid[k])) {
            throw InvalidInput("TuningSpec: grid values must be positive and finite");
        }
        if (k > 0 && !(grid[k] < grid[k - 1])) {
            throw InvalidInput("TuningSpec: grid must be sorted strictly descending");
        }
    }
}

double TuningSpec::group_ratio() const
{
    return std::sqrt(static_cast<double>(s_target) / static_cast<double>(s_g_target));
}

Lambdas default_lambdas(double sigma, Index n, Index d, Index b, Index s, Index s_g,
                        double C_lambda)
{
    if (n < 1 || d < 1 || b < 1 || s < 1 || s_g < 1) {
        throw InvalidInput("default_lambdas: counts must be >= 1");
    }
    if (s_g > s || s_g > d) throw InvalidInput("default_lambdas: need s_g <= s and s_g <= d");
    if (!(sigma > 0) || !(C_lambda > 0)) {
        throw InvalidInput("default_lambdas: sigma and C_lambda must be > 0");
    }
    const double e = std::exp(1.0);
    const double ds = static_cast<double>(s);
    const double dg = static_cast<double>(s_g);
    const double complexity = ds * std::log(e * dg * static_cast<double>(b)) +
                              dg * std::log(e * static_cast<double>(d) / dg);
    Lambdas out;
    out.lambda = C_lambda * sigma * std::sqrt(complexity * static_cast<double>(n) / ds);
    out.lambda_g = std::sqrt(ds / dg) * out.lambda;
    return out;
}

std::vector<double> default_lambda_grid(const Dataset& data, int count, double ratio)
{
    return default_lambda_grid(data, PenaltyShape{1.0, 0.0}, count, ratio);
}

std::vector<double> default_lambda_grid(const Dataset& data, PenaltyShape shape, int count,
                                        double ratio)
{
    if (count < 1 || !(ratio > 0 && ratio < 1)) {
        throw InvalidInput("default_lambda_grid: need count >= 1 and ratio in (0, 1)");
    }
    const Vector xty = data.X.transpose() * data.y;
    double top = 0.0;
    if (shape.w_elem > 0) {
        top = 2.0 * xty.cwiseAbs().maxCoeff() / shape.w_elem;
    } else if (shape.w_group > 0) {
        top = 2.0 * mixed_norm(xty, data.partition, NormOrder::Inf, NormOrder::Two) / shape.w_group;
    }
    if (!(top > 0)) throw InvalidInput("default_lambda_grid: X^T y is zero");
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double t = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
        grid[static_cast<std::size_t>(k)] = top * std::pow(ratio, t);
    }
    return grid;
}

std::vector<int> cv_fold_labels(Index n, int folds, std::uint64_t seed)
{
    if (folds < 2) throw InvalidInput("cv_fold_labels: need at least 2 folds");
    if (n < folds) throw InvalidInput("cv_fold_labels: a fold would have zero rows");
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::mt19937_64 rng(mix_seed(seed, 0xCF));
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> label(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < perm.size(); ++k) {
        label[static_cast<std::size_t>(perm[k])] = static_cast<int>(k % static_cast<std::size_t>(folds));
    }
    return label;
}

namespace {

Dataset take_rows(const Dataset& data, const std::vector<Index>& rows)
{
    Dataset out;
    out.X = data.X(rows, Eigen::all);
    out.y = data.y(rows);
    out.partition = data.partition;
    return out;
}

} // namespace

CvOutcome cv_path(const Dataset& data, const std::vector<double>& grid, PenaltyShape shape,
                  int folds, std::uint64_t seed, const SolveOptions& opts)
{
    data.validate();
    if (grid.empty()) throw InvalidInput("cv_path: empty grid");
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] < grid[k - 1])) throw InvalidInput("cv_path: grid must be sorted descending");
    }
    if (!(shape.w_elem >= 0 && shape.w_group >= 0) || shape.w_elem + shape.w_group <= 0) {
        throw InvalidInput("cv_path: penalty weights must be non-negative and not both zero");
    }
    const auto labels = cv_fold_labels(data.n(), folds, seed);

    CvOutcome out;
    out.grid = grid;
    out.table.resize(grid.size() * static_cast<std::size_t>(folds));
    for (int f = 0; f < folds; ++f) {
        std::vector<Index> train;
        std::vector<Index> test;
        for (Index i = 0; i < data.n(); ++i) {
            (labels[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
        }
        if (test.empty() || train.empty()) throw InvalidInput("cv_path: fold with zero rows");
        const Dataset tr = take_rows(data, train);
        const Dataset te = take_rows(data, test);
        Vector warm = Vector::Zero(data.p());
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const SolverResult fit =
                solve_sgl(tr, shape.w_elem * grid[g], shape.w_group * grid[g], opts, warm);
            warm = fit.beta_hat.values;
            const double mse = (te.y - te.X * warm).squaredNorm() / static_cast<double>(te.y.size());
            out.table[g * static_cast<std::size_t>(folds) + static_cast<std::size_t>(f)] =
                CvRow{grid[g], f, mse};
        }
    }

    out.mean_mse.assign(grid.size(), 0.0);
    for (const CvRow& row : out.table) {
        const auto g = static_cast<std::size_t>(&row - out.table.data()) / static_cast<std::size_t>(folds);
        out.mean_mse[g] += row.mse / folds;
    }
    // Strict < keeps the first, i.e. largest, lambda among ties.
    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        if (out.mean_mse[g] < out.mean_mse[best]) best = g;
    }
    out.lambda_best = shape.w_elem * grid[best];
    out.lambda_g_best = shape.w_group * grid[best];
    return out;
}

CvOutcome cv_select(const Dataset& data, const TuningSpec& spec, const SolveOptions& opts)
{
    spec.validate();
    const auto grid = spec.grid.empty() ? default_lambda_grid(data) : spec.grid;
    return cv_path(data, grid, PenaltyShape{1.0, spec.group_ratio()}, spec.cv_folds, spec.seed,
                   opts);
}

void write_cv_table(std::ostream& os, const std::vector<CvRow>& table)
{
    os << "lambda,fold_id,mse\n";
    char buf[96];
    for (const CvRow& r : table) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", r.lambda, r.fold_id, r.mse);
        os << buf;
    }
}

} // namespace dsreg
