#pragma once

#include <cstdint>

#include <dsreg/dataset.hpp>
#include <dsreg/grouped.hpp>

namespace dsreg {

/// splitmix64 finalizer applied to seed ^ splitmix64(index). Used to derive
/// independent, reproducible streams: mix_seed(seed, replicate), then
/// mix_seed(that, stream_id) for the sub-streams of one replicate.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

enum class CovarianceKind { Identity, Toeplitz, Equicorrelation };
enum class RowLaw { Gaussian, Rademacher };

struct DesignSpec
{
    Index n = 100;
    Index d = 20;
    Index b = 20;
    CovarianceKind covariance = CovarianceKind::Identity;
    double rho = 0.0;
    RowLaw rows = RowLaw::Gaussian;
    /// Sub-Gaussian proxy constant, recorded as metadata only.
    double kappa = 1.0;
    /// Require eigenvalues of Sigma inside [2/3, 3/2].
    bool assumption1 = true;
    std::uint64_t seed = 0;

    GroupPartition partition() const { return GroupPartition::uniform(d, b); }
    void validate() const;
};

std::string describe(CovarianceKind kind, double rho);

/// Population covariance of the rows. Throws InvalidInput when spec.assumption1
/// is set and an eigenvalue leaves [2/3, 3/2].
Matrix covariance_matrix(const DesignSpec& spec);

struct Design
{
    Matrix X;
    Matrix Sigma;
    GroupPartition partition;
    DatasetMeta meta;
};

/// X = Z Sigma^{1/2}, Z with i.i.d. N(0,1) (or Rademacher) entries drawn from
/// spec.seed. The square root comes from a symmetric eigendecomposition
/// with eigenvalues clamped at 1e-12.
Design generate_design(const DesignSpec& spec);

enum class SignalKind {
    PaperFixed,   ///< groups 0..s_g-1 hold (1,2,3,4,5,0,...,0); s = 5 s_g
    RandomSparse, ///< s_g random groups, s entries spread evenly, random signs
};

struct SignalSpec
{
    SignalKind kind = SignalKind::PaperFixed;
    Index s = 5;
    Index s_g = 1;
    double amplitude_lo = 1.0;
    double amplitude_hi = 1.0;
    std::uint64_t seed = 0;
};

/// Throws InvalidInput for (s, s_g) pairs that no vector on this partition
/// can realise, and for paper-fixed signals on groups smaller than 5.
GroupedVector generate_signal(const GroupPartition& part, const SignalSpec& spec);

/// y = X beta + eps with eps i.i.d. N(0, sigma^2); sigma = 0 returns X beta.
Vector generate_response(const Matrix& X, const GroupedVector& beta, double sigma,
                         std::uint64_t seed);

/// Design, signal and response bundled into a validated dataset.
Dataset simulate(const DesignSpec& design, const SignalSpec& signal, double sigma,
                 std::uint64_t noise_seed);

} // namespace dsreg
