#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <dsreg/error.hpp>
#include <dsreg/simgen.hpp>
#include <dsreg/tuning.hpp>

using namespace dsreg;

TEST_CASE("theory lambda against the frozen high-precision value")
{
    // mpmath, 30 digits (tests/oracles/scalar_oracles.py).
    const auto l = default_lambdas(0.1, 100, 60, 20, 5, 1);
    CHECK(l.lambda == doctest::Approx(2.2393305218297747148).epsilon(1e-14));
    CHECK(l.lambda_g == doctest::Approx(5.0072952709014530065).epsilon(1e-14));
    CHECK(default_lambdas(0.1, 100, 60, 20, 5, 1, 0.5).lambda ==
          doctest::Approx(0.5 * 2.2393305218297747148).epsilon(1e-14));
}

TEST_CASE("singleton groups with s = s_g give equal penalties")
{
    const auto l = default_lambdas(1.0, 50, 40, 1, 4, 4);
    CHECK(l.lambda_g == doctest::Approx(l.lambda).epsilon(1e-15));
}

TEST_CASE("doubling n scales lambda by sqrt 2")
{
    for (Index n : {10, 100, 333}) {
        const double a = default_lambdas(0.3, n, 20, 5, 3, 2).lambda;
        const double b = default_lambdas(0.3, 2 * n, 20, 5, 3, 2).lambda;
        CHECK(b / a == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    }
}

TEST_CASE("theory lambda is increasing in sigma, n, d and b")
{
    std::mt19937_64 rng(3);
    for (int t = 0; t < 500; ++t) {
        const double sigma = 0.01 + (rng() % 1000) / 100.0;
        const Index n = 1 + static_cast<Index>(rng() % 500);
        const Index s_g = 1 + static_cast<Index>(rng() % 5);
        const Index d = s_g + static_cast<Index>(rng() % 50);
        const Index b = 1 + static_cast<Index>(rng() % 30);
        const Index s = s_g + static_cast<Index>(rng() % 10);
        const double base = default_lambdas(sigma, n, d, b, s, s_g).lambda;
        CHECK(default_lambdas(sigma * 1.01, n, d, b, s, s_g).lambda > base);
        CHECK(default_lambdas(sigma, n + 1, d, b, s, s_g).lambda > base);
        CHECK(default_lambdas(sigma, n, d + 1, b, s, s_g).lambda > base);
        CHECK(default_lambdas(sigma, n, d, b + 1, s, s_g).lambda > base);
    }
}

TEST_CASE("theory lambda rejects bad counts")
{
    CHECK_THROWS_AS(default_lambdas(0.1, 0, 10, 5, 3, 1), InvalidInput);
    CHECK_THROWS_AS(default_lambdas(0.1, 10, 10, 5, 0, 1), InvalidInput);
    CHECK_THROWS_AS(default_lambdas(0.1, 10, 10, 5, 2, 3), InvalidInput);
    CHECK_THROWS_AS(default_lambdas(0.1, 10, 2, 5, 5, 3), InvalidInput);
    CHECK_THROWS_AS(default_lambdas(0.0, 10, 10, 5, 3, 1), InvalidInput);
}

namespace {

Dataset noisy_data(Index n, std::uint64_t seed)
{
    DesignSpec ds;
    ds.n = n;
    ds.d = 10;
    ds.b = 5;
    ds.seed = seed;
    SignalSpec sig;
    return simulate(ds, sig, 0.5, mix_seed(seed, 2));
}

} // namespace

TEST_CASE("fold labels")
{
    const auto a = cv_fold_labels(23, 5, 9);
    CHECK(a == cv_fold_labels(23, 5, 9));
    CHECK(a != cv_fold_labels(23, 5, 10));
    std::vector<int> count(5, 0);
    for (int f : a) count[static_cast<std::size_t>(f)]++;
    for (int c : count) CHECK((c == 4 || c == 5));
    CHECK_THROWS_AS(cv_fold_labels(3, 5, 0), InvalidInput);
    CHECK_THROWS_AS(cv_fold_labels(10, 1, 0), InvalidInput);
}

TEST_CASE("grid defaults")
{
    const Dataset d = noisy_data(40, 1);
    const auto g = default_lambda_grid(d);
    REQUIRE(g.size() == 30);
    CHECK(g.front() == doctest::Approx(2.0 * (d.X.transpose() * d.y).lpNorm<Eigen::Infinity>()));
    CHECK(g.back() == doctest::Approx(g.front() * 1e-3));
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] < g[k - 1]);
}

TEST_CASE("single-value grid returns that value")
{
    const Dataset d = noisy_data(40, 2);
    TuningSpec spec;
    spec.grid = {0.7};
    const auto out = cv_select(d, spec);
    CHECK(out.lambda_best == 0.7);
    CHECK(out.lambda_g_best == doctest::Approx(0.7 * std::sqrt(5.0)));
    CHECK(out.table.size() == 5);
}

TEST_CASE("cv table shape and determinism")
{
    const Dataset d = noisy_data(50, 3);
    TuningSpec spec;
    spec.grid = default_lambda_grid(d, 12);
    spec.seed = 4;
    const auto a = cv_select(d, spec);
    CHECK(a.mean_mse.size() == spec.grid.size());
    CHECK(a.table.size() == spec.grid.size() * 5);
    for (const auto& row : a.table) CHECK(std::isfinite(row.mse));
    const auto b = cv_select(d, spec);
    CHECK(a.lambda_best == b.lambda_best);
    CHECK(a.mean_mse == b.mean_mse);

    std::ostringstream os;
    write_cv_table(os, a.table);
    CHECK(os.str().rfind("lambda,fold_id,mse\n", 0) == 0);

    spec.grid = {1.0, 2.0};
    CHECK_THROWS_AS(cv_select(d, spec), InvalidInput);
    spec.grid = {2.0, 1.0};
    spec.cv_folds = 1;
    CHECK_THROWS_AS(cv_select(d, spec), InvalidInput);
    spec.cv_folds = 51;
    CHECK_THROWS_AS(cv_select(d, spec), InvalidInput);
}
