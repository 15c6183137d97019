#include <doctest.h>

#include <cmath>
#include <random>

#include <dsreg/error.hpp>
#include <dsreg/prox.hpp>

#include "support/grid_oracle.hpp"

using namespace dsreg;
using dsreg::testing::grid_minimize_2d;

TEST_CASE("scalar soft threshold")
{
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-1.0, 2.0) == 0.0);
    CHECK(soft_threshold(-5.0, 2.0) == -3.0);
    for (double x : {-3.5, -1e-300, 0.0, 2.25, 1e300}) CHECK(soft_threshold(x, 0.0) == x);
    CHECK_THROWS_AS(soft_threshold(1.0, -0.1), InvalidInput);
    CHECK_THROWS_AS(soft_threshold(Vector::Ones(2), -0.1), InvalidInput);

    const Vector v = soft_threshold(Vector{{3.0, -0.5, -4.0}}, 1.0);
    CHECK(v == Vector{{2.0, 0.0, -3.0}});
}

TEST_CASE("group soft threshold")
{
    const Vector v{{3.0, 4.0}};
    CHECK(group_soft_threshold(v, 5.0).isZero(0.0));
    CHECK(group_soft_threshold(v, 0.0) == v);
    CHECK(group_soft_threshold(Vector::Zero(3), 1.0).isZero(0.0));

    const Vector u = group_soft_threshold(v, 2.5);
    CHECK(u[0] == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(u[1] == doctest::Approx(2.0).epsilon(1e-14));

    // Brute force: argmin 1/2 ||u - v||^2 + 2.5 ||u||_2.
    const auto g = grid_minimize_2d(
        [&](double a, double b) {
            return 0.5 * ((a - 3) * (a - 3) + (b - 4) * (b - 4)) + 2.5 * std::hypot(a, b);
        },
        -6, 6);
    CHECK(std::abs(g[0] - u[0]) < 1e-6);
    CHECK(std::abs(g[1] - u[1]) < 1e-6);
}

TEST_CASE("sparse group prox examples")
{
    const GroupedVector v(Vector{{3.0, 4.0}}, GroupPartition({2}));
    CHECK(sparse_group_prox(v, {0.0, 0.0}).values == v.values);

    const Vector u = sparse_group_prox(v, {1.0, 2.5}).values;
    const double scale = 1.0 - 2.5 / std::sqrt(13.0);
    CHECK(u[0] == doctest::Approx(2.0 * scale).epsilon(1e-14));
    CHECK(u[1] == doctest::Approx(3.0 * scale).epsilon(1e-14));
    CHECK(u[0] == doctest::Approx(0.6133).epsilon(1e-4));
    CHECK(u[1] == doctest::Approx(0.9199).epsilon(1e-4));
    const auto g = grid_minimize_2d(
        [](double a, double b) {
            return 0.5 * ((a - 3) * (a - 3) + (b - 4) * (b - 4)) + std::abs(a) + std::abs(b) +
                   2.5 * std::hypot(a, b);
        },
        -6, 6);
    CHECK(std::abs(g[0] - u[0]) < 1e-6);
    CHECK(std::abs(g[1] - u[1]) < 1e-6);

    const GroupedVector w(Vector{{9.0, -3.0, 0.5, -9.99}}, GroupPartition({2, 2}));
    CHECK(sparse_group_prox(w, {10.0, 0.0}).values.isZero(0.0));

    CHECK_THROWS_AS(sparse_group_prox(w, {-1.0, 0.0}), InvalidInput);
    CHECK_THROWS_AS(sparse_group_prox(w, {0.0, NAN}), InvalidInput);
}

TEST_CASE("in-place prox agrees with the value form")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 2.0);
    const GroupPartition part({3, 1, 4});
    for (int t = 0; t < 100; ++t) {
        Vector v(8);
        for (auto& x : v) x = g(rng);
        const ProxSpec spec{std::abs(g(rng)), std::abs(g(rng))};
        Vector w = v;
        sparse_group_prox_inplace(w, part, spec);
        CHECK(w == sparse_group_prox(GroupedVector(v, part), spec).values);
    }
}

TEST_CASE("soft threshold is nonexpansive")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 3.0);
    for (int t = 0; t < 100000; ++t) {
        const double x = g(rng), y = g(rng), a = std::abs(g(rng));
        // One rounding of x - a and y - a each.
        REQUIRE(std::abs(soft_threshold(x, a) - soft_threshold(y, a)) <=
                std::abs(x - y) + 4e-16 * (std::abs(x) + std::abs(y) + a));
    }
}

TEST_CASE("prox beats random perturbations")
{
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g;
    const GroupPartition part({2, 3, 1});
    for (int t = 0; t < 50; ++t) {
        Vector v(part.p());
        for (auto& x : v) x = 2.0 * g(rng);
        const ProxSpec spec{std::abs(g(rng)), std::abs(g(rng))};
        const Vector u = sparse_group_prox(GroupedVector(v, part), spec).values;
        const auto F = [&](const Vector& w) {
            return 0.5 * (w - v).squaredNorm() +
                   sparse_group_penalty(w, part, spec.lambda_elem, spec.lambda_group);
        };
        const double fu = F(u);
        for (int k = 0; k < 1000; ++k) {
            Vector w = u;
            const double scale = std::pow(10.0, -1.0 - 4.0 * (k % 5) / 4.0);
            for (auto& x : w) x += scale * g(rng);
            REQUIRE(fu <= F(w) + 1e-10);
        }
    }
}

TEST_CASE("penalty value")
{
    const GroupPartition part({2, 2});
    CHECK(sparse_group_penalty(Vector{{3.0, 4.0, 0.0, -1.0}}, part, 2.0, 0.5) ==
          doctest::Approx(2.0 * 8.0 + 0.5 * 6.0));
}
