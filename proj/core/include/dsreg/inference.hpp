#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <dsreg/dataset.hpp>
#include <dsreg/grouped.hpp>

namespace dsreg {

struct MRowOptions
{
    double rho = 1.0;
    int max_iters = 20000;
    /// Primal/dual residual tolerance of the splitting.
    double tol = 1e-8;
    /// The splitting runs on thresholds shrunk by this relative amount so the
    /// returned row satisfies the requested constraint strictly.
    double tighten = 1e-6;
    /// Declared infeasible when the primal residual is still above this
    /// after max_iters.
    double infeasible_tol = 1e-3;
    void validate() const;
};

/**
 * Rows of the inverse-covariance surrogate:
 *
 *     minimize m^T S m   s.t.   ||H_alpha(S m - e_i)||_{inf,2} <= gamma
 *
 * with the group structure of the partition on the residual. Operator
 * splitting with z = S m - e_i: the m-step is solved in the eigenbasis of S
 * (computed once and shared by every row), the z-step projects each group
 * onto {r : ||H_alpha(r)||_2 <= gamma}, i.e. clip(r, alpha) plus the
 * soft-thresholded excess scaled back to norm gamma.
 */
class MRowSolver
{
public:
    MRowSolver(const Matrix& Sigma_hat, GroupPartition partition, MRowOptions opts = {});

    /// Throws InfeasibleProblem with the worst group when the constraint cannot be met.
    Vector solve(Index i, double alpha, double gamma) const;

    /// max_j (||H_alpha((S m - e_i)_(j))||_2 - gamma)_+
    double violation(const Eigen::Ref<const Vector>& m, Index i, double alpha, double gamma) const;

    const Matrix& sigma_hat() const { return S_; }

private:
    Matrix S_;
    Matrix V_;
    Vector evals_;
    GroupPartition part_;
    MRowOptions opts_;
};

Vector estimate_M_row(const Matrix& Sigma_hat, const GroupPartition& part, Index i, double alpha,
                      double gamma, const MRowOptions& opts = {});

/// All p rows, optionally on several threads; row order is by index.
Matrix estimate_M(const Matrix& Sigma_hat, const GroupPartition& part, double alpha, double gamma,
                  const MRowOptions& opts = {}, int threads = 1);

/// Projection of one group residual onto {r : ||H_alpha(r)||_2 <= gamma}.
Vector project_shrunk_ball(const Eigen::Ref<const Vector>& r, double alpha, double gamma);

struct InferenceThresholds
{
    double alpha = 0.0;
    double gamma = 0.0;
};

/// alpha = lambda / (n sigma), gamma = sqrt(s / s_g) alpha.
InferenceThresholds inference_thresholds(double lambda, Index n, double sigma, Index s, Index s_g);

struct DebiasResult
{
    GroupedVector beta_u;
    /// m_i^T S m_i per coordinate.
    Vector variances;
    Matrix M_rows;
    double alpha_thr = 0.0;
    double gamma_thr = 0.0;
};

Matrix sample_covariance(const Matrix& X);

/// beta_u = beta_hat + M X^T (y - X beta_hat) / n, variances diag(M S M^T).
DebiasResult debias(const Dataset& data, const GroupedVector& beta_hat, const Matrix& M,
                    double alpha_thr = 0.0, double gamma_thr = 0.0);

/// Smallest var_i - max(0, 1 - alpha - gamma)^2 / S_ii over coordinates.
double variance_bound_slack(const DebiasResult& result, const Matrix& Sigma_hat);

struct ConfidenceInterval
{
    Index index = 0;
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.0;
};

/// beta_u_i -/+ z_{(1+level)/2} sigma_hat sqrt(var_i / n).
std::vector<ConfidenceInterval> confidence_intervals(const DebiasResult& result, double sigma_hat,
                                                     double level, Index n);

/// CSV columns index,estimate,lo,hi,level and covered when truth is given.
void write_ci_csv(std::ostream& os, const std::vector<ConfidenceInterval>& cis,
                  const std::optional<Vector>& truth = std::nullopt);

} // namespace dsreg
