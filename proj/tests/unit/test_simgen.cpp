#include <doctest.h>

#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include <dsreg/error.hpp>
#include <dsreg/simgen.hpp>
#include <dsreg/stats.hpp>

using namespace dsreg;

TEST_CASE("seed mixing")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 50; ++s)
        for (std::uint64_t k = 0; k < 50; ++k) seen.insert(mix_seed(s, k));
    CHECK(seen.size() == 2500);
    CHECK(mix_seed(1, 2) == mix_seed(1, 2));
}

TEST_CASE("design determinism")
{
    DesignSpec spec;
    spec.n = 30;
    spec.d = 5;
    spec.b = 4;
    spec.covariance = CovarianceKind::Toeplitz;
    spec.rho = 0.1;
    spec.seed = 123;
    const auto a = generate_design(spec);
    const auto b = generate_design(spec);
    CHECK(a.X == b.X);
    spec.seed = 124;
    CHECK(generate_design(spec).X != a.X);
    spec.rows = RowLaw::Rademacher;
    spec.covariance = CovarianceKind::Identity;
    const auto r = generate_design(spec);
    CHECK((r.X.array().abs() == 1.0).all());
}

TEST_CASE("covariance band")
{
    DesignSpec spec;
    spec.d = 10;
    spec.b = 10;
    spec.covariance = CovarianceKind::Toeplitz;
    spec.rho = 0.9;
    // Toeplitz(0.9) on p = 100 has eigenvalues near 0.05 and 19.
    {
        Matrix S(100, 100);
        for (Index i = 0; i < 100; ++i)
            for (Index j = 0; j < 100; ++j) S(i, j) = std::pow(0.9, std::abs(i - j));
        const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(S).eigenvalues();
        CHECK(ev.minCoeff() < 2.0 / 3.0);
        CHECK(ev.maxCoeff() > 1.5);
    }
    CHECK_THROWS_AS(covariance_matrix(spec), InvalidInput);
    CHECK_THROWS_AS(generate_design(spec), InvalidInput);
    spec.assumption1 = false;
    CHECK_NOTHROW(covariance_matrix(spec));

    spec.assumption1 = true;
    spec.rho = 0.15;
    const Matrix S = covariance_matrix(spec);
    CHECK(S(0, 2) == doctest::Approx(0.0225));
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(S).eigenvalues();
    CHECK(ev.minCoeff() >= 2.0 / 3.0);
    CHECK(ev.maxCoeff() <= 1.5);

    spec.covariance = CovarianceKind::Equicorrelation;
    spec.rho = 0.1; // largest eigenvalue 1 + 99 * 0.1
    CHECK_THROWS_AS(covariance_matrix(spec), InvalidInput);
    spec.d = 1;
    spec.b = 3;
    spec.rho = 0.2; // eigenvalues 0.8 and 1.4
    CHECK_NOTHROW(covariance_matrix(spec));
    CHECK(describe(CovarianceKind::Toeplitz, 0.2) == "toeplitz(0.2)");
}

TEST_CASE("identity design moments")
{
    DesignSpec spec;
    spec.n = 1000;
    spec.d = 4;
    spec.b = 5;
    spec.seed = 1;
    const auto des = generate_design(spec);
    const double tol = 4.0 / std::sqrt(1000.0);
    for (Index j = 0; j < 20; ++j) {
        const auto col = des.X.col(j);
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / 999.0;
        CHECK(std::abs(mean) <= tol);
        CHECK(std::abs(var - 1.0) <= 0.2);
    }
    CHECK(des.Sigma == Matrix::Identity(20, 20));
    CHECK(des.meta.covariance == "identity");
}

TEST_CASE("fixed signal")
{
    const auto part = GroupPartition::uniform(100, 30);
    SignalSpec spec;
    spec.s_g = 2;
    spec.s = 10;
    const auto beta = generate_signal(part, spec);
    CHECK(beta.values.squaredNorm() == 110.0);
    const auto pat = sparsity_of(beta);
    CHECK(pat.s() == 10);
    CHECK(pat.groups == std::vector<Index>{0, 1});
    CHECK(beta.group(1).head(5) == Vector{{1.0, 2.0, 3.0, 4.0, 5.0}});

    spec.s_g = 1;
    spec.s = 5;
    const auto one = sparsity_of(generate_signal(part, spec));
    CHECK(one.s() == 5);
    CHECK(one.s_g() == 1);

    CHECK_THROWS_AS(generate_signal(GroupPartition::uniform(4, 4), spec), InvalidInput);
}

TEST_CASE("random sparse signal")
{
    const auto part = GroupPartition::uniform(10, 4);
    SignalSpec spec;
    spec.kind = SignalKind::RandomSparse;
    spec.s = 3;
    spec.s_g = 3;
    spec.amplitude_lo = 0.5;
    spec.amplitude_hi = 2.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        spec.seed = seed;
        const auto beta = generate_signal(part, spec);
        const auto pat = sparsity_of(beta);
        CHECK(pat.s() == 3);
        CHECK(pat.s_g() == 3);
        for (Index i : pat.elements) {
            CHECK(std::abs(beta.values[i]) >= 0.5);
            CHECK(std::abs(beta.values[i]) <= 2.0);
        }
    }
    spec.s = 7;
    spec.s_g = 2;
    const auto pat = sparsity_of(generate_signal(part, spec));
    CHECK(pat.s() == 7);
    CHECK(pat.s_g() == 2);

    spec.s = 9;
    CHECK_THROWS_AS(generate_signal(part, spec), InvalidInput); // 2 groups of 4
    spec.s = 1;
    CHECK_THROWS_AS(generate_signal(part, spec), InvalidInput); // s < s_g
    spec.s = 41;
    spec.s_g = 11;
    CHECK_THROWS_AS(generate_signal(part, spec), InvalidInput);
}

TEST_CASE("response")
{
    DesignSpec ds;
    ds.n = 50;
    ds.d = 3;
    ds.b = 5;
    const auto des = generate_design(ds);
    const auto beta = generate_signal(des.partition, SignalSpec{});
    CHECK(generate_response(des.X, beta, 0.0, 9) == des.X * beta.values);
    CHECK(generate_response(des.X, beta, 0.3, 9) == generate_response(des.X, beta, 0.3, 9));
}

TEST_CASE("noise energy concentrates")
{
    DesignSpec ds;
    ds.n = 1000;
    ds.d = 2;
    ds.b = 5;
    const auto des = generate_design(ds);
    const auto beta = generate_signal(des.partition, SignalSpec{});
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Vector e = generate_response(des.X, beta, 0.1, seed) - des.X * beta.values;
        const double v = e.squaredNorm() / 1000.0;
        inside += (v >= 0.008 && v <= 0.012);
    }
    CHECK(inside >= 95);
}

TEST_CASE("pure noise response is standard normal")
{
    DesignSpec ds;
    ds.n = 2000;
    ds.d = 2;
    ds.b = 3;
    const auto des = generate_design(ds);
    const auto y = generate_response(des.X, GroupedVector::zeros(des.partition), 1.0, 42);
    const auto ks = ks_test_normal(std::vector<double>(y.begin(), y.end()));
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("simulate bundles a validated dataset")
{
    DesignSpec ds;
    ds.n = 20;
    ds.d = 3;
    ds.b = 5;
    ds.seed = 3;
    const Dataset d = simulate(ds, SignalSpec{}, 0.5, 4);
    CHECK(d.n() == 20);
    CHECK(d.p() == 15);
    CHECK(*d.sigma_truth == 0.5);
    CHECK(d.meta.assumption1);
    CHECK(*d.meta.seed == 3);
    CHECK(d.X == generate_design(ds).X);
}
