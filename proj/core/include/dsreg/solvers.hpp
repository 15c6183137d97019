#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <dsreg/dataset.hpp>
#include <dsreg/grouped.hpp>

namespace dsreg {

enum class StepRule { FixedLipschitz, Backtracking };

enum class SolveStatus { Converged, MaxIters, Diverged };

std::string_view to_string(SolveStatus s) noexcept;

struct SolveOptions
{
    int max_iters = 50000;
    /// Stagnation test on accepted steps: |dF| / max(1, |F|).
    double tol_rel_obj = 1e-15;
    /// Stationarity tolerance. Unset means 1e-6 * (1 + ||X^T y||_{inf,2}).
    std::optional<double> tol_kkt;
    double tol_feasibility = 1e-8;
    double admm_rho = 1.0;
    /// Over-relaxation factor of the splitting solvers, in (0, 2).
    double admm_relaxation = 1.0;
    StepRule step_rule = StepRule::FixedLipschitz;
    bool restart = true;
    /// Solve on a growing set of groups and verify optimality on the rest.
    bool working_set = true;
    bool record_history = false;
    int power_iters = 100;
    double lipschitz_safety = 1.05;

    void validate() const;
};

struct SolverResult
{
    GroupedVector beta_hat;
    double objective = 0.0;
    int iters = 0;
    /// Penalized solvers: stationarity residual. Constrained solvers: final
    /// dual residual of the splitting.
    double kkt_residual = 0.0;
    /// Constrained solvers only: ||X beta - y||_2.
    double feasibility_residual = 0.0;
    SolveStatus status = SolveStatus::MaxIters;
    /// Objective after every iteration when SolveOptions::record_history is set.
    std::vector<double> history;
};

/// ||y - X beta||^2 + lambda ||beta||_1 + lambda_g ||beta||_{1,2}.
double sgl_objective(const Dataset& data, const Eigen::Ref<const Vector>& beta, double lambda,
                     double lambda_g);

/**
 * Sparse group Lasso
 *
 *     minimize ||y - X beta||_2^2 + lambda ||beta||_1 + lambda_g ||beta||_{1,2}
 *
 * by accelerated proximal gradient with function-value restart. The step is
 * 1 / L with L = 2 * 1.05 * sigma_max(X^T X) from power iteration, so the
 * thresholds handed to sparse_group_prox are (lambda / L, lambda_g / L).
 * Stops once kkt_residual_sgl drops below the tolerance.
 */
SolverResult solve_sgl(const Dataset& data, double lambda, double lambda_g,
                       const SolveOptions& opts = {});
SolverResult solve_sgl(const Dataset& data, double lambda, double lambda_g,
                       const SolveOptions& opts, const Eigen::Ref<const Vector>& warm_start);

/**
 * Stationarity residual of the penalized problem at beta, with gradient
 * g = 2 X^T (X beta - y). Zero groups contribute (||H_lambda(g_j)||_2 - lambda_g)_+;
 * active groups contribute the norm of the exact subgradient residual on the
 * group. The result is the maximum over groups.
 */
double kkt_residual_sgl(const Dataset& data, const Eigen::Ref<const Vector>& beta,
                        double lambda, double lambda_g);

double default_tol_kkt(const Dataset& data);

SolverResult solve_lasso(const Dataset& data, double lambda, const SolveOptions& opts = {});
SolverResult solve_group_lasso(const Dataset& data, double lambda_g,
                               const SolveOptions& opts = {});

/**
 * minimize weight_elem ||beta||_1 + weight_group ||beta||_{1,2}  s.t.  X beta = y
 *
 * Consensus ADMM: the beta step projects onto {X beta = y} with a cached
 * factorization, the z step applies sparse_group_prox, and rho is rebalanced
 * when the primal and dual residuals drift apart by more than 10x.
 * The returned beta is the projected (feasible) iterate.
 * Throws InvalidInput when y is not in the range of X.
 */
SolverResult solve_constrained(const Dataset& data, double weight_elem, double weight_group,
                               const SolveOptions& opts = {});

/// l1 + ratio * l_{1,2} minimization under X beta = y; ratio = lambda_g / lambda.
SolverResult solve_noiseless(const Dataset& data, double ratio, const SolveOptions& opts = {});
SolverResult solve_l1_min(const Dataset& data, const SolveOptions& opts = {});
SolverResult solve_l12_min(const Dataset& data, const SolveOptions& opts = {});

/// Which group penalty the scaled estimator uses.
enum class ScaledGroupPenalty {
    MixedL12, ///< lambda_g ||beta||_{1,2}, consistent with the unscaled estimator
    PlainL2,  ///< lambda_g ||beta||_2 over the whole vector
};

struct ScaledResult
{
    SolverResult fit;
    double sigma_hat = 0.0;
    bool sigma_floored = false;
    int outer_iters = 0;
};

inline constexpr double scaled_sigma_floor = 1e-12;

/**
 * Joint minimization over (beta, sigma) of
 *
 *     ||y - X beta||^2 / sigma + n sigma + lambda_t ||beta||_1 + lambda_gt * group penalty
 *
 * by alternating the closed-form sigma = ||y - X beta|| / sqrt(n) with a
 * solve_sgl call at penalties (sigma lambda_t, sigma lambda_gt). Stops when
 * sigma moves less than 1e-6 relatively.
 */
ScaledResult solve_scaled_sgl(const Dataset& data, double lambda_t, double lambda_gt,
                              const SolveOptions& opts = {},
                              ScaledGroupPenalty form = ScaledGroupPenalty::MixedL12);

/// sigma-step of the scaled estimator for a fixed beta.
double scaled_sigma_update(const Dataset& data, const Eigen::Ref<const Vector>& beta);

/// Largest eigenvalue of X^T X by power iteration from a fixed start vector.
double power_iteration_max_eig(const Matrix& X, int iters);

} // namespace dsreg
