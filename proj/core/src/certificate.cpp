#include <dsreg/certificate.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <dsreg/error.hpp>
#include <dsreg/simgen.hpp>

namespace dsreg {

namespace {

std::vector<Index> complement(const std::vector<Index>& sorted, Index p)
{
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(p) - sorted.size());
    auto it = sorted.begin();
    for (Index i = 0; i < p; ++i) {
        if (it != sorted.end() && *it == i) {
            ++it;
        } else {
            out.push_back(i);
        }
    }
    return out;
}

// Calls f(groups) for every k-subset of {0..d-1} in lexicographic order.
template <class F>
void for_each_combination(Index d, Index k, F&& f)
{
    std::vector<Index> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), Index{0});
    if (k > d) return;
    while (true) {
        f(idx);
        Index i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == d - k + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (Index j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

std::size_t binomial_saturating(Index n, Index k)
{
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long double r = 1.0L;
    for (Index i = 1; i <= k; ++i) {
        r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
        if (r > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2)) {
            return std::numeric_limits<std::size_t>::max();
        }
    }
    return static_cast<std::size_t>(std::llround(r));
}

void check_rip_args(const Matrix& X, const GroupPartition& part, Index s2, Index s2_g)
{
    if (X.cols() != part.p()) throw InvalidInput("rip_check: X columns do not match partition");
    if (X.rows() < 1) throw InvalidInput("rip_check: X has no rows");
    if (s2 < 1 || s2_g < 1 || s2_g > s2) throw InvalidInput("rip_check: need 1 <= s2_g <= s2");
}

std::vector<Index> group_union(const GroupPartition& part, const std::vector<Index>& groups)
{
    std::vector<Index> cols;
    for (Index j : groups)
        for (Index k = 0; k < part.size(j); ++k) cols.push_back(part.offset(j) + k);
    return cols;
}

} // namespace

double irrepresentable_margin(const Matrix& Sigma, const SparsityPattern& pattern, Index p)
{
    if (Sigma.rows() != p || Sigma.cols() != p) {
        throw InvalidInput("irrepresentable_margin: Sigma must be p x p");
    }
    const auto& T = pattern.elements;
    if (T.empty()) return 0.0;
    const auto Tc = complement(T, p);
    if (Tc.empty()) return 0.0;
    const Matrix S_TT = Sigma(T, T);
    Eigen::SelfAdjointEigenSolver<Matrix> es(S_TT, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 1e-12 * std::max(1.0, hi))) {
        throw InvalidInput("irrepresentable_margin: Sigma_TT is singular (condition number " +
                           std::to_string(lo > 0 ? hi / lo : std::numeric_limits<double>::infinity()) +
                           ")");
    }
    // Rows of Sigma_{Tc,T} Sigma_TT^{-1} = (Sigma_TT^{-1} Sigma_{T,Tc})^T.
    const Matrix W = S_TT.ldlt().solve(Sigma(T, Tc));
    const double worst = W.colwise().norm().maxCoeff();
    return std::sqrt(static_cast<double>(T.size())) * worst;
}

std::size_t count_maximal_supports(const GroupPartition& part, Index s2, Index s2_g)
{
    const Index k = std::min(s2_g, part.d());
    std::size_t total = 0;
    bool saturated = false;
    for_each_combination(part.d(), k, [&](const std::vector<Index>& groups) {
        if (saturated) return;
        Index room = 0;
        for (Index j : groups) room += part.size(j);
        const std::size_t c = binomial_saturating(room, std::min(s2, room));
        if (c > std::numeric_limits<std::size_t>::max() - total) {
            saturated = true;
            return;
        }
        total += c;
    });
    return saturated ? std::numeric_limits<std::size_t>::max() : total;
}

RipResult rip_check(const Matrix& X, const GroupPartition& part, Index s2, Index s2_g,
                    RipMode mode, std::size_t samples, std::uint64_t seed)
{
    check_rip_args(X, part, s2, s2_g);
    const double n = static_cast<double>(X.rows());
    const Matrix gram = X.transpose() * X / n;

    RipResult out;
    out.worst_lower = std::numeric_limits<double>::infinity();
    out.worst_upper = -std::numeric_limits<double>::infinity();
    auto visit = [&](const std::vector<Index>& cols) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(gram(cols, cols), Eigen::EigenvaluesOnly);
        out.worst_lower = std::min(out.worst_lower, es.eigenvalues()(0));
        out.worst_upper = std::max(out.worst_upper, es.eigenvalues()(es.eigenvalues().size() - 1));
        ++out.supports_checked;
    };

    const Index k = std::min(s2_g, part.d());
    if (mode == RipMode::Exhaustive) {
        if (count_maximal_supports(part, s2, s2_g) > rip_exhaustive_limit) {
            throw InvalidInput("rip_check: more than 1e5 supports; use monte-carlo mode");
        }
        for_each_combination(part.d(), k, [&](const std::vector<Index>& groups) {
            const auto pool = group_union(part, groups);
            const Index m = std::min(s2, static_cast<Index>(pool.size()));
            for_each_combination(static_cast<Index>(pool.size()), m, [&](const std::vector<Index>& pick) {
                std::vector<Index> cols(pick.size());
                for (std::size_t t = 0; t < pick.size(); ++t) cols[t] = pool[static_cast<std::size_t>(pick[t])];
                visit(cols);
            });
        });
    } else {
        if (samples < 1) throw InvalidInput("rip_check: monte-carlo mode needs samples >= 1");
        std::mt19937_64 rng(mix_seed(seed, 0x51B));
        std::vector<Index> all_groups(static_cast<std::size_t>(part.d()));
        std::iota(all_groups.begin(), all_groups.end(), Index{0});
        for (std::size_t t = 0; t < samples; ++t) {
            std::shuffle(all_groups.begin(), all_groups.end(), rng);
            std::vector<Index> groups(all_groups.begin(), all_groups.begin() + k);
            std::sort(groups.begin(), groups.end());
            auto pool = group_union(part, groups);
            std::shuffle(pool.begin(), pool.end(), rng);
            pool.resize(static_cast<std::size_t>(std::min(s2, static_cast<Index>(pool.size()))));
            std::sort(pool.begin(), pool.end());
            visit(pool);
        }
    }
    out.ok = out.worst_lower >= 1.0 / 3.0 && out.worst_upper <= 5.0 / 3.0;
    return out;
}

GroupedVector exact_target(const GroupedVector& beta_star, const SparsityPattern& pattern)
{
    const auto& part = beta_star.partition;
    GroupedVector u0 = GroupedVector::zeros(part);
    const double s = static_cast<double>(pattern.s());
    const double s_g = static_cast<double>(pattern.s_g());
    if (pattern.s() == 0) return u0;
    const double scale = std::sqrt(s / s_g);
    for (Index j : pattern.groups) {
        Vector restricted = Vector::Zero(part.size(j));
        for (Index i : pattern.elements) {
            if (part.group_of(i) == j) {
                const double v = beta_star.values[i];
                if (v == 0.0) throw InvalidInput("exact_target: pattern lists a zero of beta_star");
                restricted[i - part.offset(j)] = v;
            }
        }
        const double norm = restricted.norm();
        if (norm == 0.0) throw InvalidInput("exact_target: empty group in G");
        for (Index k = 0; k < part.size(j); ++k) {
            const double v = restricted[k];
            if (v != 0.0) u0.group(j)[k] = scale * v / norm + (v > 0 ? 1.0 : -1.0);
        }
    }
    return u0;
}

std::vector<Index> golfing_batches(Index n, Index s)
{
    if (n < 1 || s < 1) throw InvalidInput("golfing_batches: n and s must be >= 1");
    const Index l_max = static_cast<Index>(std::ceil(std::log(std::exp(1.0) * static_cast<double>(s)))) + 2;
    const Index first = n / 4;
    const Index rest = n - 2 * first;
    const Index tail = l_max - 2;
    std::vector<Index> out{first, first};
    for (Index l = 0; l < tail; ++l) out.push_back(rest / tail + (l < rest % tail ? 1 : 0));
    if (std::any_of(out.begin(), out.end(), [](Index m) { return m < 1; })) {
        throw InvalidInput("golfing_batches: n too small for the batch schedule");
    }
    return out;
}

GolfingResult golfing_construct(const Dataset& data, const std::optional<Matrix>& Sigma,
                                const SparsityPattern& pattern, const GroupedVector& beta_star,
                                const std::vector<Index>& batches)
{
    const Index n = data.n();
    const Index p = data.p();
    if (beta_star.values.size() != p) throw InvalidInput("golfing_construct: beta length mismatch");
    if (batches.empty()) throw InvalidInput("golfing_construct: no batches");
    Index used = 0;
    for (Index m : batches) {
        if (m < 1) throw InvalidInput("golfing_construct: batch with fewer than 1 row");
        used += m;
    }
    if (used > n) throw InvalidInput("golfing_construct: batches exceed the number of rows");
    const auto& T = pattern.elements;

    GolfingResult out;
    out.batches = batches;
    out.u = GroupedVector::zeros(data.partition);
    if (T.empty()) {
        out.q_norms.assign(batches.size() + 1, 0.0);
        return out;
    }

    Matrix S_TT;
    if (Sigma) {
        if (Sigma->rows() != p || Sigma->cols() != p) throw InvalidInput("golfing_construct: Sigma must be p x p");
        S_TT = (*Sigma)(T, T);
    } else {
        const Index left = n - used;
        const Index start = left >= static_cast<Index>(T.size()) ? used : 0;
        const Index rows = left >= static_cast<Index>(T.size()) ? left : n;
        const Matrix XT = data.X.middleRows(start, rows)(Eigen::all, T);
        S_TT = XT.transpose() * XT / static_cast<double>(rows);
        out.sigma_estimated = true;
    }
    const Eigen::LDLT<Matrix> solver(S_TT);
    if (solver.info() != Eigen::Success) throw InvalidInput("golfing_construct: Sigma_TT factorization failed");

    const GroupedVector u0 = exact_target(beta_star, pattern);
    Vector q = u0.values(T);
    out.q_norms.push_back(q.norm());
    Index row = 0;
    for (Index m : batches) {
        const auto Xl = data.X.middleRows(row, m);
        const Vector w = Xl(Eigen::all, T) * solver.solve(q) / static_cast<double>(m);
        const Vector gamma = Xl.transpose() * w;
        out.u.values += gamma;
        q -= gamma(T);
        out.q_norms.push_back(q.norm());
        row += m;
    }
    return out;
}

CertificateReport certificate_verify(const Dataset& data, const SparsityPattern& pattern,
                                     const GroupedVector& beta_star, const GroupedVector& u)
{
    const Index p = data.p();
    const double n = static_cast<double>(data.n());
    if (u.values.size() != p || beta_star.values.size() != p) {
        throw InvalidInput("certificate_verify: vector length mismatch");
    }
    const auto& T = pattern.elements;
    const auto& part = data.partition;
    CertificateReport rep;
    rep.u = u;

    rep.sigma_min.threshold = 0.5;
    rep.cond_a.threshold = 1.0 / 8.0;
    rep.cond_c.threshold = 0.5;
    rep.cond_b.threshold =
        pattern.s_g() > 0 ? std::sqrt(static_cast<double>(pattern.s()) / static_cast<double>(pattern.s_g())) / 2.0
                          : 0.0;

    if (!T.empty()) {
        const Matrix XT = data.X(Eigen::all, T);
        const Matrix C = XT.transpose() * data.X / n; // |T| x p
        Eigen::SelfAdjointEigenSolver<Matrix> es(C(Eigen::all, T), Eigen::EigenvaluesOnly);
        rep.sigma_min.value = es.eigenvalues()(0);
        const auto Tc = complement(T, p);
        const double cross = Tc.empty() ? 0.0 : C(Eigen::all, Tc).colwise().norm().maxCoeff();
        const GroupedVector u0 = exact_target(beta_star, pattern);
        rep.cond_a.value = (u.values(T) - u0.values(T)).norm() * cross;
    } else {
        rep.sigma_min.value = std::numeric_limits<double>::infinity();
        rep.cond_a.value = 0.0;
    }
    rep.sigma_min.ok = rep.sigma_min.value >= rep.sigma_min.threshold;
    rep.cond_a.ok = rep.cond_a.value <= rep.cond_a.threshold;

    double worst_b = 0.0;
    for (Index j = 0; j < part.d(); ++j) {
        if (std::binary_search(pattern.groups.begin(), pattern.groups.end(), j)) continue;
        double ss = 0.0;
        for (Index k = 0; k < part.size(j); ++k) {
            const double e = std::max(std::abs(u.group(j)[k]) - 0.5, 0.0);
            ss += e * e;
        }
        worst_b = std::max(worst_b, std::sqrt(ss));
    }
    rep.cond_b.value = worst_b;
    rep.cond_b.ok = rep.cond_b.value <= rep.cond_b.threshold;

    double worst_c = 0.0;
    for (Index i : pattern.in_group_off_support(part)) worst_c = std::max(worst_c, std::abs(u.values[i]));
    rep.cond_c.value = worst_c;
    rep.cond_c.ok = rep.cond_c.value <= rep.cond_c.threshold;
    return rep;
}

std::string to_json(const CertificateReport& report, int indent)
{
    using nlohmann::json;
    auto cond = [](const Condition& c) {
        json j;
        j["value"] = std::isfinite(c.value) ? json(c.value) : json(nullptr);
        j["threshold"] = c.threshold;
        j["margin"] = std::isfinite(c.margin()) ? json(c.margin()) : json(nullptr);
        j["ok"] = c.ok;
        return j;
    };
    json j;
    j["passed"] = report.passed();
    j["sigma_min"] = cond(report.sigma_min);
    j["cond_a"] = cond(report.cond_a);
    j["cond_b"] = cond(report.cond_b);
    j["cond_c"] = cond(report.cond_c);
    j["batches"] = report.batches;
    const auto& v = report.u.values;
    j["u"] = std::vector<double>(v.data(), v.data() + v.size());
    return j.dump(indent);
}

} // namespace dsreg
