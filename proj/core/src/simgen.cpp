#include <dsreg/simgen.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include <dsreg/error.hpp>

namespace dsreg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Sub-stream identifiers for one generator call.
constexpr std::uint64_t stream_design = 1;
constexpr std::uint64_t stream_signal = 2;
constexpr std::uint64_t stream_noise = 3;

} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
    return splitmix64(seed ^ splitmix64(index));
}

void DesignSpec::validate() const
{
    if (n < 1 || d < 1 || b < 1) throw InvalidInput("DesignSpec: n, d, b must be >= 1");
    if (!(kappa > 0)) throw InvalidInput("DesignSpec: kappa must be > 0");
    if (covariance != CovarianceKind::Identity && !(std::abs(rho) < 1.0)) {
        throw InvalidInput("DesignSpec: |rho| must be < 1");
    }
}

std::string describe(CovarianceKind kind, double rho)
{
    std::ostringstream os;
    switch (kind) {
    case CovarianceKind::Identity: return "identity";
    case CovarianceKind::Toeplitz: os << "toeplitz(" << rho << ")"; break;
    case CovarianceKind::Equicorrelation: os << "equicorrelation(" << rho << ")"; break;
    }
    return os.str();
}

Matrix covariance_matrix(const DesignSpec& spec)
{
    spec.validate();
    const Index p = spec.d * spec.b;
    Matrix S = Matrix::Identity(p, p);
    if (spec.covariance == CovarianceKind::Toeplitz) {
        for (Index i = 0; i < p; ++i)
            for (Index j = 0; j < p; ++j) S(i, j) = std::pow(spec.rho, static_cast<double>(std::abs(i - j)));
    } else if (spec.covariance == CovarianceKind::Equicorrelation) {
        S.setConstant(spec.rho);
        S.diagonal().setOnes();
    }
    if (spec.assumption1 && spec.covariance != CovarianceKind::Identity) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (lo < sigma_eig_lower - 1e-12 || hi > sigma_eig_upper + 1e-12) {
            std::ostringstream os;
            os << describe(spec.covariance, spec.rho) << " has eigenvalues in [" << lo << ", "
               << hi << "], outside [2/3, 3/2]";
            throw InvalidInput(os.str());
        }
    }
    return S;
}

Design generate_design(const DesignSpec& spec)
{
    Design out;
    out.Sigma = covariance_matrix(spec);
    out.partition = spec.partition();
    const Index n = spec.n;
    const Index p = out.partition.p();

    std::mt19937_64 rng(mix_seed(spec.seed, stream_design));
    Matrix Z(n, p);
    if (spec.rows == RowLaw::Gaussian) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < p; ++j) Z(i, j) = gauss(rng);
    } else {
        std::bernoulli_distribution coin(0.5);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < p; ++j) Z(i, j) = coin(rng) ? 1.0 : -1.0;
    }

    if (spec.covariance == CovarianceKind::Identity) {
        out.X = std::move(Z);
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> es(out.Sigma);
        const Vector root = es.eigenvalues().cwiseMax(1e-12).cwiseSqrt();
        const Matrix half = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
        out.X = Z * half;
    }

    out.meta.seed = spec.seed;
    out.meta.kappa = spec.kappa;
    out.meta.covariance = describe(spec.covariance, spec.rho);
    out.meta.assumption1 = spec.assumption1;
    return out;
}

GroupedVector generate_signal(const GroupPartition& part, const SignalSpec& spec)
{
    GroupedVector beta = GroupedVector::zeros(part);
    if (spec.kind == SignalKind::PaperFixed) {
        if (spec.s_g < 0 || spec.s_g > part.d()) {
            throw InvalidInput("generate_signal: s_g must lie in [0, d]");
        }
        for (Index j = 0; j < spec.s_g; ++j) {
            if (part.size(j) < 5) {
                throw InvalidInput("generate_signal: the fixed pattern needs groups of size >= 5");
            }
            for (Index k = 0; k < 5; ++k) beta.group(j)[k] = static_cast<double>(k + 1);
        }
        return beta;
    }

    const Index s = spec.s;
    const Index s_g = spec.s_g;
    if (s_g < 0 || s_g > part.d() || s < s_g || (s_g == 0 && s != 0)) {
        throw InvalidInput("generate_signal: need 0 <= s_g <= d and s_g <= s");
    }
    std::vector<Index> largest = part.sizes();
    std::sort(largest.begin(), largest.end(), std::greater<>());
    const Index cap = std::accumulate(largest.begin(), largest.begin() + s_g, Index{0});
    if (s > cap) {
        throw InvalidInput("generate_signal: s exceeds the room in any s_g groups");
    }
    if (!(spec.amplitude_lo > 0) || spec.amplitude_hi < spec.amplitude_lo) {
        throw InvalidInput("generate_signal: amplitude range must satisfy 0 < lo <= hi");
    }
    if (s == 0) return beta;

    std::mt19937_64 rng(mix_seed(spec.seed, stream_signal));
    std::vector<Index> order(static_cast<std::size_t>(part.d()));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    Index room_total = 0;
    for (Index k = 0; k < s_g; ++k) room_total += part.size(order[static_cast<std::size_t>(k)]);
    if (room_total < s) {
        std::stable_sort(order.begin(), order.end(),
                         [&](Index a, Index c) { return part.size(a) > part.size(c); });
    }
    std::vector<Index> chosen(order.begin(), order.begin() + s_g);

    // Even spread, overflow moved to groups with spare room.
    std::vector<Index> count(static_cast<std::size_t>(s_g), s / s_g);
    for (Index k = 0; k < s % s_g; ++k) ++count[static_cast<std::size_t>(k)];
    Index overflow = 0;
    for (Index k = 0; k < s_g; ++k) {
        const Index room = part.size(chosen[static_cast<std::size_t>(k)]);
        if (count[static_cast<std::size_t>(k)] > room) {
            overflow += count[static_cast<std::size_t>(k)] - room;
            count[static_cast<std::size_t>(k)] = room;
        }
    }
    for (Index k = 0; k < s_g && overflow > 0; ++k) {
        const Index room = part.size(chosen[static_cast<std::size_t>(k)]) - count[static_cast<std::size_t>(k)];
        const Index take = std::min(room, overflow);
        count[static_cast<std::size_t>(k)] += take;
        overflow -= take;
    }

    std::uniform_real_distribution<double> amp(spec.amplitude_lo, spec.amplitude_hi);
    std::bernoulli_distribution coin(0.5);
    for (Index k = 0; k < s_g; ++k) {
        const Index j = chosen[static_cast<std::size_t>(k)];
        std::vector<Index> pos(static_cast<std::size_t>(part.size(j)));
        std::iota(pos.begin(), pos.end(), Index{0});
        std::shuffle(pos.begin(), pos.end(), rng);
        for (Index m = 0; m < count[static_cast<std::size_t>(k)]; ++m) {
            const double a = amp(rng);
            beta.group(j)[pos[static_cast<std::size_t>(m)]] = coin(rng) ? a : -a;
        }
    }
    return beta;
}

Vector generate_response(const Matrix& X, const GroupedVector& beta, double sigma,
                         std::uint64_t seed)
{
    if (!(sigma >= 0)) throw InvalidInput("generate_response: sigma must be >= 0");
    if (beta.values.size() != X.cols()) {
        throw InvalidInput("generate_response: beta length does not match X");
    }
    Vector y = X * beta.values;
    if (sigma > 0) {
        std::mt19937_64 rng(mix_seed(seed, stream_noise));
        std::normal_distribution<double> gauss(0.0, sigma);
        for (Index i = 0; i < y.size(); ++i) y[i] += gauss(rng);
    }
    return y;
}

Dataset simulate(const DesignSpec& design, const SignalSpec& signal, double sigma,
                 std::uint64_t noise_seed)
{
    Design des = generate_design(design);
    GroupedVector beta = generate_signal(des.partition, signal);
    Dataset d;
    d.y = generate_response(des.X, beta, sigma, noise_seed);
    d.X = std::move(des.X);
    d.partition = des.partition;
    d.sigma_truth = sigma;
    d.beta_truth = std::move(beta);
    d.Sigma = std::move(des.Sigma);
    d.meta = des.meta;
    d.validate();
    return d;
}

} // namespace dsreg
