#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <dsreg/dataset.hpp>
#include <dsreg/grouped.hpp>

namespace dsreg {

/**
 * sqrt(s) * max_{i not in T} ||Sigma_{i,T} Sigma_{T,T}^{-1}||_2, so the
 * irrepresentable condition reads margin <= c. Throws InvalidInput carrying
 * the condition number when Sigma_{T,T} is numerically singular.
 */
double irrepresentable_margin(const Matrix& Sigma, const SparsityPattern& pattern,
                              Index p);

enum class RipMode { Exhaustive, MonteCarlo };

struct RipResult
{
    bool ok = false;
    double worst_lower = 0.0;
    double worst_upper = 0.0;
    std::size_t supports_checked = 0;
};

/// Supports larger than this are refused by exhaustive rip_check.
inline constexpr std::size_t rip_exhaustive_limit = 100000;

/**
 * Extreme eigenvalues of X_S^T X_S / n over (s2, s2_g)-sparse supports S,
 * ok iff all lie in [1/3, 5/3].
 *
 * Exhaustive mode enumerates the maximal supports (min(s2_g, d) groups, as
 * many coordinates inside them as s2 allows); by eigenvalue interlacing every
 * smaller support has its spectrum inside one of these. Monte-Carlo mode draws
 * `samples` maximal supports from `seed`.
 */
RipResult rip_check(const Matrix& X, const GroupPartition& part, Index s2, Index s2_g,
                    RipMode mode, std::size_t samples = 1000, std::uint64_t seed = 0);

/// Number of maximal (s2, s2_g) supports, saturating at SIZE_MAX.
std::size_t count_maximal_supports(const GroupPartition& part, Index s2, Index s2_g);

/**
 * On T: sqrt(s / s_g) * beta_{T,(j)} / ||beta_{T,(j)}||_2 + sgn(beta_T).
 * Zero off T. s and s_g are the sizes of the pattern.
 */
GroupedVector exact_target(const GroupedVector& beta_star, const SparsityPattern& pattern);

/// l_max = ceil(log(e s)) + 2 batches; the first two get floor(n / 4) rows
/// each and the rest is split as evenly as possible.
std::vector<Index> golfing_batches(Index n, Index s);

struct GolfingResult
{
    GroupedVector u;
    /// ||q_l||_2 = ||(alpha_l)_T||_2 for l = 0..l_max.
    std::vector<double> q_norms;
    std::vector<Index> batches;
    /// Sigma_{T,T} was estimated from data instead of supplied.
    bool sigma_estimated = false;
};

/**
 * Golfing scheme. Rows are taken in order in disjoint blocks of the given
 * sizes; with q_0 = (u_0)_T,
 *
 *     gamma_l = X_{I_l}^T X_{I_l,T} Sigma_TT^{-1} q_{l-1} / n_l,
 *     q_l     = q_{l-1} - (gamma_l)_T,
 *
 * and u = sum_l gamma_l, which lies in the row span of X. Without Sigma the
 * sample covariance of X_T on the rows not used by any batch stands in
 * (all rows when fewer than |T| are left over).
 */
GolfingResult golfing_construct(const Dataset& data, const std::optional<Matrix>& Sigma,
                                const SparsityPattern& pattern, const GroupedVector& beta_star,
                                const std::vector<Index>& batches);

struct Condition
{
    double value = 0.0;
    double threshold = 0.0;
    bool ok = false;
    double margin() const { return threshold - value; }
};

struct CertificateReport
{
    Condition sigma_min;  ///< sigma_min(X_T^T X_T / n), passes when >= 1/2
    Condition cond_a;     ///< ||u_T - u0_T|| * max_{i not in T} ||X_T^T X_i / n|| <= 1/8
    Condition cond_b;     ///< ||H_{1/2}(u_{(G^c)})||_{inf,2} <= sqrt(s / s_g) / 2
    Condition cond_c;     ///< ||u_{(G) \ T}||_inf <= 1/2
    GroupedVector u;
    std::vector<Index> batches;

    bool passed() const { return sigma_min.ok && cond_a.ok && cond_b.ok && cond_c.ok; }
};

CertificateReport certificate_verify(const Dataset& data, const SparsityPattern& pattern,
                                     const GroupedVector& beta_star, const GroupedVector& u);

std::string to_json(const CertificateReport& report, int indent = 2);

} // namespace dsreg
