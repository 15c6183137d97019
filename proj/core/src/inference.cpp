#include <dsreg/inference.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include <Eigen/Eigenvalues>

#include <dsreg/error.hpp>
#include <dsreg/stats.hpp>

namespace dsreg {

void MRowOptions::validate() const
{
    if (!(rho > 0) || max_iters < 1 || !(tol > 0) || !(tighten >= 0 && tighten < 1) ||
        !(infeasible_tol > 0)) {
        throw InvalidInput("MRowOptions: invalid option values");
    }
}

Vector project_shrunk_ball(const Eigen::Ref<const Vector>& r, double alpha, double gamma)
{
    Vector clip = r.cwiseMax(-alpha).cwiseMin(alpha);
    Vector excess = r - clip;
    const double norm = excess.norm();
    if (norm > gamma) excess *= gamma / norm;
    return clip + excess;
}

MRowSolver::MRowSolver(const Matrix& Sigma_hat, GroupPartition partition, MRowOptions opts)
    : S_(Sigma_hat), part_(std::move(partition)), opts_(opts)
{
    opts_.validate();
    if (S_.rows() != S_.cols() || S_.rows() != part_.p()) {
        throw InvalidInput("MRowSolver: Sigma_hat must be p x p matching the partition");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(S_);
    if (es.info() != Eigen::Success) throw InvalidInput("MRowSolver: eigendecomposition failed");
    V_ = es.eigenvectors();
    evals_ = es.eigenvalues().cwiseMax(0.0);
    // Directions with numerically zero eigenvalue cannot change S m.
    const double cut = 1e-12 * std::max(1.0, evals_.maxCoeff());
    for (Index k = 0; k < evals_.size(); ++k)
        if (evals_[k] <= cut) evals_[k] = 0.0;
}

double MRowSolver::violation(const Eigen::Ref<const Vector>& m, Index i, double alpha,
                             double gamma) const
{
    Vector r = S_ * m;
    r[i] -= 1.0;
    double worst = 0.0;
    for (Index j = 0; j < part_.d(); ++j) {
        const auto g = part_.segment(r, j);
        double ss = 0.0;
        for (Index k = 0; k < g.size(); ++k) {
            const double e = std::max(std::abs(g[k]) - alpha, 0.0);
            ss += e * e;
        }
        worst = std::max(worst, std::sqrt(ss) - gamma);
    }
    return std::max(worst, 0.0);
}

Vector MRowSolver::solve(Index i, double alpha, double gamma) const
{
    const Index p = part_.p();
    if (i < 0 || i >= p) throw InvalidInput("estimate_M_row: coordinate out of range");
    if (!(alpha > 0) || !(gamma > 0)) throw InvalidInput("estimate_M_row: thresholds must be > 0");
    const double a = alpha * (1.0 - opts_.tighten);
    const double g = gamma * (1.0 - opts_.tighten);

    // m = V mt; S m = V (evals .* mt). The iteration only needs S m.
    double rho = opts_.rho;
    Vector mt = Vector::Zero(p);
    Vector Sm = Vector::Zero(p);
    Vector z = Vector::Zero(p);
    z[i] = -1.0; // residual of m = 0
    for (Index j = 0; j < part_.d(); ++j) part_.segment(z, j) = project_shrunk_ball(part_.segment(z, j), a, g);
    Vector w = Vector::Zero(p);
    Vector c(p);
    Vector r(p);
    double primal = 0.0;
    for (int it = 1; it <= opts_.max_iters; ++it) {
        // m-step: minimize m^T S m + rho/2 ||S m - e_i - z + w||^2.
        c = z - w;
        c[i] += 1.0;
        const Vector ct = V_.transpose() * c;
        for (Index k = 0; k < p; ++k) mt[k] = evals_[k] > 0 ? rho * ct[k] / (2.0 + rho * evals_[k]) : 0.0;
        Sm = V_ * evals_.cwiseProduct(mt);

        // z-step: groupwise projection.
        r = Sm + w;
        r[i] -= 1.0;
        const Vector z_old = z;
        for (Index j = 0; j < part_.d(); ++j) part_.segment(z, j) = project_shrunk_ball(part_.segment(r, j), a, g);

        Vector res = Sm - z;
        res[i] -= 1.0;
        w += res;
        primal = res.norm();
        const double dual = rho * (z - z_old).norm();
        if (primal <= opts_.tol && dual <= opts_.tol) break;

        if (it % 10 == 0) {
            if (primal > 10.0 * dual) {
                rho *= 2.0;
                w /= 2.0;
            } else if (dual > 10.0 * primal) {
                rho /= 2.0;
                w *= 2.0;
            }
        }
    }
    Vector m = V_ * mt;

    const double viol = violation(m, i, alpha, gamma);
    if (viol > 0.0 && primal > opts_.infeasible_tol) {
        Vector rr = S_ * m;
        rr[i] -= 1.0;
        Index worst = 0;
        double worst_v = -1.0;
        for (Index j = 0; j < part_.d(); ++j) {
            const auto seg = part_.segment(rr, j);
            const double v = (seg.cwiseAbs().array() - alpha).max(0.0).matrix().norm();
            if (v > worst_v) {
                worst_v = v;
                worst = j;
            }
        }
        throw InfeasibleProblem("estimate_M_row: constraint violation stagnates for coordinate " +
                                    std::to_string(i),
                                static_cast<std::size_t>(worst));
    }
    return m;
}

Vector estimate_M_row(const Matrix& Sigma_hat, const GroupPartition& part, Index i, double alpha,
                      double gamma, const MRowOptions& opts)
{
    return MRowSolver(Sigma_hat, part, opts).solve(i, alpha, gamma);
}

Matrix estimate_M(const Matrix& Sigma_hat, const GroupPartition& part, double alpha, double gamma,
                  const MRowOptions& opts, int threads)
{
    const MRowSolver solver(Sigma_hat, part, opts);
    const Index p = part.p();
    Matrix M(p, p);
    threads = std::max(1, std::min<int>(threads, static_cast<int>(p)));
    if (threads == 1) {
        for (Index i = 0; i < p; ++i) M.row(i) = solver.solve(i, alpha, gamma).transpose();
        return M;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (Index i = t; i < p; i += threads) M.row(i) = solver.solve(i, alpha, gamma).transpose();
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return M;
}

InferenceThresholds inference_thresholds(double lambda, Index n, double sigma, Index s, Index s_g)
{
    if (!(lambda > 0) || !(sigma > 0) || n < 1 || s < 1 || s_g < 1 || s_g > s) {
        throw InvalidInput("inference_thresholds: invalid arguments");
    }
    InferenceThresholds t;
    t.alpha = lambda / (static_cast<double>(n) * sigma);
    t.gamma = std::sqrt(static_cast<double>(s) / static_cast<double>(s_g)) * t.alpha;
    return t;
}

Matrix sample_covariance(const Matrix& X)
{
    return X.transpose() * X / static_cast<double>(X.rows());
}

DebiasResult debias(const Dataset& data, const GroupedVector& beta_hat, const Matrix& M,
                    double alpha_thr, double gamma_thr)
{
    const Index p = data.p();
    if (beta_hat.values.size() != p || M.rows() != p || M.cols() != p) {
        throw InvalidInput("debias: dimensions do not agree");
    }
    const double n = static_cast<double>(data.n());
    DebiasResult out;
    const Vector resid = data.y - data.X * beta_hat.values;
    out.beta_u = GroupedVector(beta_hat.values + M * (data.X.transpose() * resid) / n, data.partition);
    const Matrix XM = data.X * M.transpose(); // column i is X m_i
    out.variances = XM.colwise().squaredNorm().transpose() / n;
    out.M_rows = M;
    out.alpha_thr = alpha_thr;
    out.gamma_thr = gamma_thr;
    return out;
}

double variance_bound_slack(const DebiasResult& result, const Matrix& Sigma_hat)
{
    const double base = std::max(0.0, 1.0 - result.alpha_thr - result.gamma_thr);
    double worst = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < result.variances.size(); ++i) {
        worst = std::min(worst, result.variances[i] - base * base / Sigma_hat(i, i));
    }
    return worst;
}

std::vector<ConfidenceInterval> confidence_intervals(const DebiasResult& result, double sigma_hat,
                                                     double level, Index n)
{
    if (!(level > 0 && level < 1)) throw InvalidInput("confidence_intervals: level must lie in (0, 1)");
    if (!(sigma_hat >= 0) || n < 1) throw InvalidInput("confidence_intervals: invalid sigma or n");
    const double z = normal_quantile((1.0 + level) / 2.0);
    std::vector<ConfidenceInterval> out;
    out.reserve(static_cast<std::size_t>(result.variances.size()));
    for (Index i = 0; i < result.variances.size(); ++i) {
        const double half = z * sigma_hat * std::sqrt(result.variances[i] / static_cast<double>(n));
        const double est = result.beta_u.values[i];
        out.push_back({i, est, est - half, est + half, level});
    }
    return out;
}

void write_ci_csv(std::ostream& os, const std::vector<ConfidenceInterval>& cis,
                  const std::optional<Vector>& truth)
{
    os << "index,estimate,lo,hi,level" << (truth ? ",covered" : "") << '\n';
    char buf[160];
    for (const auto& ci : cis) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g", static_cast<long>(ci.index),
                      ci.estimate, ci.lo, ci.hi, ci.level);
        os << buf;
        if (truth) {
            const double t = (*truth)[ci.index];
            os << ',' << (ci.lo <= t && t <= ci.hi ? 1 : 0);
        }
        os << '\n';
    }
}

} // namespace dsreg
