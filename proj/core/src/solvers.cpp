#include <dsreg/solvers.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <dsreg/error.hpp>
#include <dsreg/prox.hpp>

namespace dsreg {

std::string_view to_string(SolveStatus s) noexcept
{
    switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max-iters";
    case SolveStatus::Diverged: return "diverged";
    }
    return "unknown";
}

void SolveOptions::validate() const
{
    if (max_iters < 1) throw InvalidInput("SolveOptions: max_iters must be >= 1");
    if (!(tol_rel_obj > 0)) throw InvalidInput("SolveOptions: tol_rel_obj must be > 0");
    if (tol_kkt && !(*tol_kkt > 0)) throw InvalidInput("SolveOptions: tol_kkt must be > 0");
    if (!(tol_feasibility > 0)) throw InvalidInput("SolveOptions: tol_feasibility must be > 0");
    if (!(admm_rho > 0)) throw InvalidInput("SolveOptions: admm_rho must be > 0");
    if (!(admm_relaxation > 0 && admm_relaxation < 2)) {
        throw InvalidInput("SolveOptions: admm_relaxation must lie in (0, 2)");
    }
    if (power_iters < 1) throw InvalidInput("SolveOptions: power_iters must be >= 1");
    if (!(lipschitz_safety >= 1)) throw InvalidInput("SolveOptions: lipschitz_safety must be >= 1");
}

namespace {

void require_penalty(double v, const char* name)
{
    if (!(v >= 0) || !std::isfinite(v)) {
        throw InvalidInput(std::string(name) + " must be finite and >= 0");
    }
}

double group_stationarity(const Eigen::Ref<const Vector>& b, const Eigen::Ref<const Vector>& g,
                          double lambda, double lambda_g)
{
    double hsq = 0.0;
    for (Index k = 0; k < g.size(); ++k) {
        const double m = std::abs(g[k]) - lambda;
        if (m > 0) hsq += m * m;
    }
    double r = std::max(0.0, std::sqrt(hsq) - lambda_g);

    const double nb = b.norm();
    if (nb > 0.0) {
        double esq = 0.0;
        for (Index k = 0; k < b.size(); ++k) {
            double e;
            if (b[k] != 0.0) {
                e = g[k] + lambda * (b[k] > 0 ? 1.0 : -1.0) + lambda_g * b[k] / nb;
            } else {
                e = std::max(0.0, std::abs(g[k]) - lambda);
            }
            esq += e * e;
        }
        r = std::max(r, std::sqrt(esq));
    }
    return r;
}

double kkt_from_gradient(const Vector& beta, const Vector& grad, const GroupPartition& part,
                         double lambda, double lambda_g)
{
    double worst = 0.0;
    for (Index j = 0; j < part.d(); ++j) {
        worst = std::max(worst, group_stationarity(part.segment(beta, j), part.segment(grad, j),
                                                   lambda, lambda_g));
    }
    return worst;
}

struct ApgOutcome
{
    int iters = 0;
    SolveStatus status = SolveStatus::MaxIters;
    double objective = 0.0;
    double kkt = std::numeric_limits<double>::infinity();
};

// Accelerated proximal gradient with function-value restart on a (possibly
// column-restricted) problem. x is the warm start on entry and the iterate on
// exit.
ApgOutcome run_apg(const Matrix& X, const Vector& y, const GroupPartition& part, double lambda,
                   double lambda_g, Vector& x, const SolveOptions& opts, double tol_kkt,
                   int budget, std::vector<double>* history)
{
    constexpr int check_every = 10;
    constexpr int stagnation_limit = 10;

    double L = 2.0 * power_iteration_max_eig(X, opts.power_iters) * opts.lipschitz_safety;
    if (!(L > 0)) L = 1.0;

    auto objective = [&](const Vector& Xv, const Vector& v) {
        return (Xv - y).squaredNorm() + sparse_group_penalty(v, part, lambda, lambda_g);
    };

    Vector Xx = X * x;
    Vector x_prev = x;
    Vector Xx_prev = Xx;
    double Fx = objective(Xx, x);
    const double F0 = Fx;
    double t = 1.0;

    Vector yk(x.size()), grad(x.size()), z(x.size());
    Vector Xy(y.size()), Xz(y.size());

    ApgOutcome out;
    int stagnant = 0;
    double last_kkt = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= budget; ++it) {
        out.iters = it;
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double mom = (t - 1.0) / t_next;
        yk = x + mom * (x - x_prev);
        Xy = Xx + mom * (Xx - Xx_prev);
        const Vector resid_y = Xy - y;
        grad.noalias() = 2.0 * X.transpose() * resid_y;
        const double fy = resid_y.squaredNorm();

        for (;;) {
            z = yk - grad / L;
            sparse_group_prox_inplace(z, part, {lambda / L, lambda_g / L});
            Xz.noalias() = X * z;
            if (opts.step_rule != StepRule::Backtracking) break;
            const Vector dz = z - yk;
            const double model = fy + grad.dot(dz) + 0.5 * L * dz.squaredNorm();
            if ((Xz - y).squaredNorm() <= model + 1e-12 * std::max(1.0, std::abs(fy))) break;
            L *= 2.0;
        }

        // Difference of objectives, formed directly so that it keeps its sign
        // near the optimum where F(z) and F(x) agree to the last digits.
        const double dF = (Xz - Xx).dot(Xz + Xx - 2.0 * y) +
                          sparse_group_penalty(z, part, lambda, lambda_g) -
                          sparse_group_penalty(x, part, lambda, lambda_g);
        // A plain proximal step descends in exact arithmetic once L bounds the
        // curvature, so an ascent at rounding level is noise and the step is kept.
        const bool rounding = mom == 0.0 && dF <= 1e-13 * std::max(1.0, std::abs(Fx));
        if (opts.restart && dF > 0.0 && !rounding) {
            if (mom == 0.0) L *= 2.0;
            x_prev = x;
            Xx_prev = Xx;
            t = 1.0;
            if (history) history->push_back(Fx);
            continue;
        }
        const double Fz = dF > 0.0 && rounding ? Fx : Fx + dF;

        const double rel = std::abs(Fx - Fz) / std::max(1.0, std::abs(Fz));
        x_prev.swap(x);
        x.swap(z);
        Xx_prev.swap(Xx);
        Xx.swap(Xz);
        Fx = Fz;
        t = t_next;
        if (history) history->push_back(Fx);

        if (!std::isfinite(Fx) || (Fx > 10.0 * F0 && Fx > 0.0)) {
            out.status = SolveStatus::Diverged;
            out.objective = Fx;
            return out;
        }
        stagnant = rel < opts.tol_rel_obj ? stagnant + 1 : 0;

        if (it % check_every == 0 || it == budget) {
            const Vector g = 2.0 * (X.transpose() * (Xx - y));
            out.kkt = kkt_from_gradient(x, g, part, lambda, lambda_g);
            if (out.kkt <= tol_kkt) {
                out.status = SolveStatus::Converged;
                break;
            }
            // The objective can stall at rounding level while the iterates still
            // converge; give up only when stationarity stalls as well.
            if (stagnant >= stagnation_limit && out.kkt > 0.9 * last_kkt) break;
            last_kkt = std::min(last_kkt, out.kkt);
        }
    }
    if (out.status != SolveStatus::Converged) {
        const Vector g = 2.0 * (X.transpose() * (Xx - y));
        out.kkt = kkt_from_gradient(x, g, part, lambda, lambda_g);
        if (out.kkt <= tol_kkt) out.status = SolveStatus::Converged;
    }
    out.objective = Fx;
    return out;
}

// Columns of the groups listed in `groups`, in order, with the matching partition.
struct Restriction
{
    Matrix X;
    GroupPartition part;
    std::vector<Index> cols;
};

Restriction restrict_groups(const Matrix& X, const GroupPartition& part,
                            const std::vector<Index>& groups)
{
    Restriction r;
    std::vector<Index> sizes;
    for (Index j : groups) {
        sizes.push_back(part.size(j));
        for (Index k = 0; k < part.size(j); ++k) r.cols.push_back(part.offset(j) + k);
    }
    r.part = GroupPartition(std::move(sizes));
    r.X.resize(X.rows(), static_cast<Index>(r.cols.size()));
    for (std::size_t c = 0; c < r.cols.size(); ++c) r.X.col(static_cast<Index>(c)) = X.col(r.cols[c]);
    return r;
}

SolverResult solve_sgl_impl(const Dataset& data, double lambda, double lambda_g,
                            const SolveOptions& opts, Vector beta)
{
    data.validate();
    opts.validate();
    require_penalty(lambda, "lambda");
    require_penalty(lambda_g, "lambda_g");
    if (lambda == 0.0 && lambda_g == 0.0 && data.n() < data.p()) {
        throw InvalidInput("solve_sgl: lambda = lambda_g = 0 requires n >= p");
    }
    if (beta.size() != data.p()) throw InvalidInput("solve_sgl: warm start has the wrong length");
    if (!beta.allFinite()) throw InvalidInput("solve_sgl: warm start must be finite");

    const double tol = opts.tol_kkt.value_or(default_tol_kkt(data));
    const auto& part = data.partition;
    SolverResult res;
    std::vector<double>* hist = opts.record_history ? &res.history : nullptr;

    if (!opts.working_set) {
        const auto out = run_apg(data.X, data.y, part, lambda, lambda_g, beta, opts, tol,
                                 opts.max_iters, hist);
        res.iters = out.iters;
        res.status = out.status;
    } else {
        std::vector<char> active(static_cast<std::size_t>(part.d()), 0);
        Vector grad = 2.0 * (data.X.transpose() * (data.X * beta - data.y));
        for (Index j = 0; j < part.d(); ++j) {
            const bool nonzero = (part.segment(beta, j).array() != 0.0).any();
            const double r = group_stationarity(part.segment(beta, j), part.segment(grad, j),
                                                lambda, lambda_g);
            if (nonzero || r > tol) active[static_cast<std::size_t>(j)] = 1;
        }
        res.status = SolveStatus::Converged;
        for (;;) {
            std::vector<Index> groups;
            for (Index j = 0; j < part.d(); ++j)
                if (active[static_cast<std::size_t>(j)]) groups.push_back(j);
            if (groups.empty()) break;

            const auto sub = restrict_groups(data.X, part, groups);
            Vector xb(static_cast<Index>(sub.cols.size()));
            for (std::size_t c = 0; c < sub.cols.size(); ++c) xb[static_cast<Index>(c)] = beta[sub.cols[c]];
            const auto out = run_apg(sub.X, data.y, sub.part, lambda, lambda_g, xb, opts, tol,
                                     opts.max_iters - res.iters, hist);
            res.iters += out.iters;
            for (std::size_t c = 0; c < sub.cols.size(); ++c) beta[sub.cols[c]] = xb[static_cast<Index>(c)];
            res.status = out.status;
            if (out.status == SolveStatus::Diverged) break;

            grad.noalias() = 2.0 * (data.X.transpose() * (data.X * beta - data.y));
            bool added = false;
            for (Index j = 0; j < part.d(); ++j) {
                if (active[static_cast<std::size_t>(j)]) continue;
                if (group_stationarity(part.segment(beta, j), part.segment(grad, j), lambda,
                                       lambda_g) > tol) {
                    active[static_cast<std::size_t>(j)] = 1;
                    added = true;
                }
            }
            if (!added) break;
            res.status = SolveStatus::MaxIters;
            if (res.iters >= opts.max_iters) break;
        }
    }

    res.kkt_residual = kkt_residual_sgl(data, beta, lambda, lambda_g);
    if (res.status == SolveStatus::Converged && res.kkt_residual > tol) {
        res.status = SolveStatus::MaxIters;
    }
    res.objective = sgl_objective(data, beta, lambda, lambda_g);
    res.beta_hat = GroupedVector(std::move(beta), part);
    return res;
}

// Projection onto the affine set {beta : X beta = y}.
class AffineProjector
{
public:
    AffineProjector(const Matrix& X, const Vector& y, double tol)
        : X_(X), y_(y)
    {
        const Index n = X.rows();
        const Index p = X.cols();
        if (n <= p) {
            llt_.compute(X * X.transpose());
            if (llt_.info() == Eigen::Success && llt_.rcond() > 1e-12) {
                mode_ = Mode::Cholesky;
                x0_ = X.transpose() * llt_.solve(y);
                check_consistent(tol);
                return;
            }
        }
        Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double cut = static_cast<double>(std::max(n, p)) *
                           std::numeric_limits<double>::epsilon() *
                           (sv.size() ? sv[0] : 0.0);
        Index r = 0;
        while (r < sv.size() && sv[r] > cut) ++r;
        basis_ = svd.matrixV().leftCols(r);
        range_ = svd.matrixU().leftCols(r) * sv.head(r).cwiseInverse().asDiagonal();
        const Vector coef = (svd.matrixU().leftCols(r).transpose() * y).cwiseQuotient(sv.head(r));
        x0_ = basis_ * coef;
        mode_ = r == p ? Mode::Unique : Mode::Basis;
        check_consistent(tol);
    }

    bool unique() const noexcept { return mode_ == Mode::Unique; }
    const Vector& min_norm_solution() const noexcept { return x0_; }

    void project(const Vector& v, Vector& out) const
    {
        switch (mode_) {
        case Mode::Unique:
            out = x0_;
            break;
        case Mode::Cholesky:
            out = v - X_.transpose() * llt_.solve(X_ * v - y_);
            break;
        case Mode::Basis:
            out = v - basis_ * (basis_.transpose() * v) + x0_;
            break;
        }
    }

    // Least-squares nu in X^T nu = g.
    Vector multiplier(const Vector& g) const
    {
        if (mode_ == Mode::Cholesky) return llt_.solve(X_ * g);
        return range_ * (basis_.transpose() * g);
    }

private:
    enum class Mode { Unique, Cholesky, Basis };

    void check_consistent(double tol) const
    {
        const double gap = (X_ * x0_ - y_).norm();
        if (gap > tol * (1.0 + y_.norm())) {
            throw InvalidInput("solve_constrained: y is not in the range of X (residual " +
                               std::to_string(gap) + ")");
        }
    }

    const Matrix& X_;
    const Vector& y_;
    Mode mode_ = Mode::Basis;
    Eigen::LLT<Matrix> llt_;
    Matrix basis_;
    Matrix range_;
    Vector x0_;
};

} // namespace

double power_iteration_max_eig(const Matrix& X, int iters)
{
    const Index p = X.cols();
    if (p == 0 || X.rows() == 0) return 0.0;
    Vector v(p);
    for (Index i = 0; i < p; ++i) v[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
    v.normalize();
    double est = 0.0;
    for (int k = 0; k < iters; ++k) {
        Vector w = X.transpose() * (X * v);
        const double nrm = w.norm();
        if (nrm == 0.0) return 0.0;
        est = v.dot(w);
        v = w / nrm;
    }
    // Rayleigh quotient at the final vector.
    return std::max(est, (X * v).squaredNorm());
}

double sgl_objective(const Dataset& data, const Eigen::Ref<const Vector>& beta, double lambda,
                     double lambda_g)
{
    return (data.y - data.X * beta).squaredNorm() +
           sparse_group_penalty(beta, data.partition, lambda, lambda_g);
}

double default_tol_kkt(const Dataset& data)
{
    const Vector xty = data.X.transpose() * data.y;
    return 1e-6 * (1.0 + mixed_norm(xty, data.partition, NormOrder::Inf, NormOrder::Two));
}

double kkt_residual_sgl(const Dataset& data, const Eigen::Ref<const Vector>& beta, double lambda,
                        double lambda_g)
{
    require_penalty(lambda, "lambda");
    require_penalty(lambda_g, "lambda_g");
    if (beta.size() != data.p()) throw InvalidInput("kkt_residual_sgl: beta has the wrong length");
    const Vector b = beta;
    const Vector grad = 2.0 * (data.X.transpose() * (data.X * b - data.y));
    return kkt_from_gradient(b, grad, data.partition, lambda, lambda_g);
}

SolverResult solve_sgl(const Dataset& data, double lambda, double lambda_g,
                       const SolveOptions& opts)
{
    return solve_sgl_impl(data, lambda, lambda_g, opts, Vector::Zero(data.p()));
}

SolverResult solve_sgl(const Dataset& data, double lambda, double lambda_g,
                       const SolveOptions& opts, const Eigen::Ref<const Vector>& warm_start)
{
    return solve_sgl_impl(data, lambda, lambda_g, opts, Vector(warm_start));
}

SolverResult solve_lasso(const Dataset& data, double lambda, const SolveOptions& opts)
{
    return solve_sgl(data, lambda, 0.0, opts);
}

SolverResult solve_group_lasso(const Dataset& data, double lambda_g, const SolveOptions& opts)
{
    return solve_sgl(data, 0.0, lambda_g, opts);
}

namespace {

// Tries to finish the constrained problem exactly from an ADMM iterate. The
// support of z gives a candidate solving X_S b = y; it is optimal when the
// multiplier estimate, corrected to match the subgradient on S, is a valid
// subgradient off S as well. Returns the largest violation (0 when certified)
// or infinity when the candidate is not available.
double polish_constrained(const Matrix& X, const Vector& y, const GroupPartition& part, double w1,
                          double w2, const Vector& z, Vector nu, double tol_feas, Vector& beta)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<Index> S;
    for (Index i = 0; i < z.size(); ++i)
        if (z[i] != 0.0) S.push_back(i);
    if (S.empty() || static_cast<Index>(S.size()) > X.rows()) return inf;

    Matrix XS(X.rows(), static_cast<Index>(S.size()));
    for (std::size_t c = 0; c < S.size(); ++c) XS.col(static_cast<Index>(c)) = X.col(S[c]);
    const Eigen::ColPivHouseholderQR<Matrix> qr(XS);
    if (qr.rank() < XS.cols()) return inf;
    const Vector bS = qr.solve(y);
    if ((XS * bS - y).norm() > tol_feas * (1.0 + y.norm())) return inf;
    if ((bS.array() == 0.0).any()) return inf;

    Vector cand = Vector::Zero(z.size());
    for (std::size_t c = 0; c < S.size(); ++c) cand[S[c]] = bS[static_cast<Index>(c)];

    // Subgradient of the penalty on S, single valued there.
    Vector cS(static_cast<Index>(S.size()));
    for (std::size_t c = 0; c < S.size(); ++c) {
        const Index i = S[c];
        const Index j = part.group_of(i);
        const double gn = part.segment(cand, j).norm();
        cS[static_cast<Index>(c)] = w1 * (cand[i] > 0 ? 1.0 : -1.0) + w2 * cand[i] / gn;
    }

    // nu starts from the ADMM multiplier; correct it so that X_S^T nu = cS exactly:
    // nu += Q R^{-T} P^T (cS - X_S^T nu).
    const Vector e = cS - XS.transpose() * nu;
    const Index k = XS.cols();
    const Vector pe = qr.colsPermutation().transpose() * e;
    const Vector w = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>().transpose().solve(pe);
    Vector qw = Vector::Zero(X.rows());
    qw.head(k) = w;
    nu += qr.householderQ() * qw;

    const Vector g = X.transpose() * nu;
    double viol = (XS.transpose() * nu - cS).lpNorm<Eigen::Infinity>();
    for (Index j = 0; j < part.d(); ++j) {
        const auto gj = part.segment(g, j);
        const auto bj = part.segment(cand, j);
        if ((bj.array() != 0.0).any()) {
            for (Index t = 0; t < gj.size(); ++t)
                if (bj[t] == 0.0) viol = std::max(viol, std::abs(gj[t]) - w1);
        } else {
            viol = std::max(viol, soft_threshold(Vector(gj), w1).norm() - w2);
        }
    }
    beta = std::move(cand);
    return std::max(viol, 0.0);
}

} // namespace

SolverResult solve_constrained(const Dataset& data, double weight_elem, double weight_group,
                               const SolveOptions& opts)
{
    data.validate();
    opts.validate();
    require_penalty(weight_elem, "weight_elem");
    require_penalty(weight_group, "weight_group");
    if (weight_elem == 0.0 && weight_group == 0.0) {
        throw InvalidInput("solve_constrained: at least one penalty weight must be positive");
    }
    const auto& part = data.partition;
    const AffineProjector proj(data.X, data.y, opts.tol_feasibility);

    SolverResult res;
    auto finish = [&](Vector beta) {
        res.feasibility_residual = (data.X * beta - data.y).norm();
        res.objective = sparse_group_penalty(beta, part, weight_elem, weight_group);
        res.beta_hat = GroupedVector(std::move(beta), part);
        return res;
    };

    if (proj.unique()) {
        res.status = SolveStatus::Converged;
        return finish(proj.min_norm_solution());
    }

    const Index p = data.p();
    double rho = opts.admm_rho;
    const double relax = opts.admm_relaxation;
    const double tol = opts.tol_feasibility;
    Vector z = proj.min_norm_solution();
    Vector u = Vector::Zero(p);
    Vector beta(p), zhat(p), z_old(p);
    int next_adapt = 10;

    for (int it = 1; it <= opts.max_iters; ++it) {
        res.iters = it;
        proj.project(z - u, beta);
        zhat = relax * beta + (1.0 - relax) * z;
        z_old = z;
        z = zhat + u;
        sparse_group_prox_inplace(z, part, {weight_elem / rho, weight_group / rho});
        u += zhat - z;

        const double r = (beta - z).norm();
        const double s = rho * (z - z_old).norm();
        const double eps_pri = tol * (1.0 + std::max(beta.norm(), z.norm()));
        const double eps_dual = tol * (1.0 + rho * u.norm());
        res.kkt_residual = s;
        if (opts.record_history) {
            res.history.push_back(sparse_group_penalty(beta, part, weight_elem, weight_group));
        }
        if (!beta.allFinite() || !z.allFinite()) {
            res.status = SolveStatus::Diverged;
            return finish(beta);
        }
        if (r <= eps_pri && s <= eps_dual) {
            res.status = SolveStatus::Converged;
            return finish(beta);
        }
        if (it % 50 == 0) {
            Vector cand;
            const double viol = polish_constrained(data.X, data.y, part, weight_elem, weight_group, z,
                                                   proj.multiplier(rho * u), tol, cand);
            if (viol <= tol * (1.0 + std::max(weight_elem, weight_group))) {
                res.kkt_residual = viol;
                res.status = SolveStatus::Converged;
                return finish(std::move(cand));
            }
        }
        if (it == next_adapt) {
            next_adapt *= 2;
            const double rp = r / eps_pri;
            const double rd = s / eps_dual;
            if (rp > 10.0 * rd) {
                rho *= 2.0;
                u *= 0.5;
            } else if (rd > 10.0 * rp) {
                rho *= 0.5;
                u *= 2.0;
            }
        }
    }
    res.status = SolveStatus::MaxIters;
    return finish(beta);
}

SolverResult solve_noiseless(const Dataset& data, double ratio, const SolveOptions& opts)
{
    if (!(ratio > 0) || !std::isfinite(ratio)) {
        throw InvalidInput("solve_noiseless: ratio must be positive and finite");
    }
    return solve_constrained(data, 1.0, ratio, opts);
}

SolverResult solve_l1_min(const Dataset& data, const SolveOptions& opts)
{
    return solve_constrained(data, 1.0, 0.0, opts);
}

SolverResult solve_l12_min(const Dataset& data, const SolveOptions& opts)
{
    return solve_constrained(data, 0.0, 1.0, opts);
}

double scaled_sigma_update(const Dataset& data, const Eigen::Ref<const Vector>& beta)
{
    return (data.y - data.X * beta).norm() / std::sqrt(static_cast<double>(data.n()));
}

ScaledResult solve_scaled_sgl(const Dataset& data, double lambda_t, double lambda_gt,
                              const SolveOptions& opts, ScaledGroupPenalty form)
{
    require_penalty(lambda_t, "lambda_t");
    require_penalty(lambda_gt, "lambda_gt");
    data.validate();

    // The plain-l2 form is the mixed norm over a single all-covering group.
    Dataset single;
    const Dataset* target = &data;
    if (form == ScaledGroupPenalty::PlainL2) {
        single = data;
        single.partition = GroupPartition({data.p()});
        single.beta_truth.reset();
        target = &single;
    }

    constexpr int max_outer = 100;
    ScaledResult out;
    Vector beta = Vector::Zero(data.p());
    double sigma = scaled_sigma_update(data, beta);
    if (sigma < scaled_sigma_floor) {
        sigma = scaled_sigma_floor;
        out.sigma_floored = true;
    }
    for (int k = 1; k <= max_outer; ++k) {
        out.outer_iters = k;
        out.fit = solve_sgl(*target, sigma * lambda_t, sigma * lambda_gt, opts, beta);
        beta = out.fit.beta_hat.values;
        double next = scaled_sigma_update(data, beta);
        if (next < scaled_sigma_floor) {
            next = scaled_sigma_floor;
            out.sigma_floored = true;
        }
        const double change = std::abs(next - sigma) / sigma;
        sigma = next;
        if (change < 1e-6 || out.sigma_floored) break;
    }
    out.sigma_hat = sigma;
    out.fit.beta_hat = GroupedVector(beta, data.partition);
    return out;
}

} // namespace dsreg
