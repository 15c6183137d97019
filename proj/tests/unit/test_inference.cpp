#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/QR>

#include <dsreg/error.hpp>
#include <dsreg/inference.hpp>
#include <dsreg/prox.hpp>
#include <dsreg/simgen.hpp>
#include <dsreg/tuning.hpp>

#include "support/grid_oracle.hpp"

using namespace dsreg;
using dsreg::testing::grid_minimize_2d;

TEST_CASE("identity covariance")
{
    const GroupPartition part({2, 3});
    const Matrix I = Matrix::Identity(5, 5);
    for (const auto [a, g] : {std::pair{0.01, 0.02}, {0.2, 0.1}, {0.001, 0.5}}) {
        MRowSolver solver(I, part);
        for (Index i = 0; i < 5; ++i) {
            const Vector m = solver.solve(i, a, g);
            CHECK(m.squaredNorm() <= 1.0 + 1e-6);
            CHECK(solver.violation(m, i, a, g) <= 1e-6);
            // e_i itself is feasible and the returned row is no worse.
            CHECK(solver.violation(Vector::Unit(5, i), i, a, g) == 0.0);
        }
    }
}

TEST_CASE("diagonal covariance against a grid oracle")
{
    Matrix S = Matrix::Zero(2, 2);
    S(0, 0) = 2.0;
    S(1, 1) = 1.0;
    for (const auto& sizes : {std::vector<Index>{2}, std::vector<Index>{1, 1}}) {
        const GroupPartition part(sizes);
        const double a = 0.01, g = 0.01;
        const Vector m = estimate_M_row(S, part, 0, a, g);
        const MRowSolver solver(S, part);
        const auto ref = grid_minimize_2d(
            [&](double x, double y) {
                const Vector v{{x, y}};
                if (solver.violation(v, 0, a, g) > 0.0) return 1e300;
                return v.dot(S * v);
            },
            -1, 1);
        CHECK(std::abs(m[0] - ref[0]) <= 1e-4);
        CHECK(std::abs(m[1] - ref[1]) <= 1e-4);
        CHECK(m[0] == doctest::Approx(0.5).epsilon(0.05));
        CHECK(std::abs(m[1]) <= 1e-4);
    }
}

TEST_CASE("huge thresholds make zero optimal")
{
    Matrix S{{1.0, 0.3}, {0.3, 1.0}};
    const Vector m = estimate_M_row(S, GroupPartition({2}), 1, 0.6, 0.6);
    CHECK(m.norm() <= 1e-8);
}

TEST_CASE("unreachable constraint reports infeasibility")
{
    // e_0 is outside the range of a rank-one S; |t - 1| and |t| cannot both be
    // below alpha + gamma = 0.2.
    const Matrix S = Matrix::Ones(2, 2);
    MRowOptions o;
    o.max_iters = 3000;
    CHECK_THROWS_AS(estimate_M_row(S, GroupPartition::singletons(2), 0, 0.1, 0.1, o),
                    InfeasibleProblem);
    CHECK_THROWS_AS(estimate_M_row(S, GroupPartition({2}), 0, 0.0, 0.1), InvalidInput);
}

namespace {

struct ProjectionCase
{
    int dim;
    std::vector<double> r;
    double alpha, gamma;
    std::vector<double> x;
};

const std::vector<ProjectionCase> projection_cases{
#include "oracles/projection_instances.inc"
};

} // namespace

TEST_CASE("shrunk-ball projection against the cvxpy oracle")
{
    REQUIRE(projection_cases.size() == 40);
    for (const auto& c : projection_cases) {
        const Vector r = Eigen::Map<const Vector>(c.r.data(), c.dim);
        const Vector x = Eigen::Map<const Vector>(c.x.data(), c.dim);
        const Vector p = project_shrunk_ball(r, c.alpha, c.gamma);
        // The interior-point oracle is accurate in distance (about 1e-9) but only to
        // about 1e-5 in argument; a feasible point no farther than its optimum is
        // the projection.
        CHECK(soft_threshold(p, c.alpha).norm() <= c.gamma * (1 + 1e-12) + 1e-12);
        CHECK((p - r).norm() <= (x - r).norm() + 1e-9);
        CHECK((p - x).norm() <= 1e-4);
    }
    const Vector inside{{0.1, -0.2}};
    CHECK(project_shrunk_ball(inside, 0.5, 0.1) == inside);
}

TEST_CASE("theory thresholds")
{
    const auto l = default_lambdas(1.0, 400, 20, 5, 3, 2);
    const auto t = inference_thresholds(l.lambda, 400, 1.0, 3, 2);
    CHECK(t.alpha == doctest::Approx(0.11730631364427288866).epsilon(1e-14));
    CHECK(t.gamma == doctest::Approx(std::sqrt(1.5) * 0.11730631364427288866).epsilon(1e-14));
}

namespace {

Dataset small_data(double sigma, std::uint64_t seed)
{
    DesignSpec ds;
    ds.n = 60;
    ds.d = 4;
    ds.b = 5;
    ds.seed = seed;
    SignalSpec sig;
    return simulate(ds, sig, sigma, 3);
}

} // namespace

TEST_CASE("debias identities")
{
    const Dataset d = small_data(0.0, 1);
    const Matrix S = sample_covariance(d.X);
    CHECK((S - d.X.transpose() * d.X / 60.0).norm() <= 1e-12);

    const Matrix M = Matrix::Random(20, 20);
    const auto r = debias(d, *d.beta_truth, M);
    CHECK((r.beta_u.values - d.beta_truth->values).norm() <= 1e-12);

    const GroupedVector bh(Vector::Random(20), d.partition);
    CHECK(debias(d, bh, Matrix::Zero(20, 20)).beta_u.values == bh.values);

    const Matrix diagMSM = M * S * M.transpose();
    CHECK((r.variances - diagMSM.diagonal()).norm() <= 1e-10);
}

TEST_CASE("orthogonal design with identity M gives least squares")
{
    const Index n = 16;
    Matrix Z = Matrix::Random(n, n);
    const Matrix Q = Eigen::HouseholderQR<Matrix>(Z).householderQ();
    const Matrix X = std::sqrt(static_cast<double>(n)) * Q.leftCols(6);
    const Vector y = Vector::Random(n);
    const Dataset d = make_dataset(X, y, GroupPartition({3, 3}));
    const GroupedVector bh(Vector::Random(6), d.partition);
    const auto r = debias(d, bh, Matrix::Identity(6, 6));
    CHECK((r.beta_u.values - X.transpose() * y / n).norm() <= 1e-12);
}

TEST_CASE("confidence intervals")
{
    DebiasResult r;
    r.beta_u = GroupedVector(Vector{{0.3, -1.0}}, GroupPartition({2}));
    r.variances = Vector::Ones(2);
    const auto ci = confidence_intervals(r, 1.0, 0.95, 100);
    REQUIRE(ci.size() == 2);
    // scipy.stats.norm.ppf(0.975)
    CHECK(ci[0].hi - ci[0].estimate == doctest::Approx(1.959963984540054 / 10).epsilon(1e-12));
    CHECK(ci[0].estimate - ci[0].lo == doctest::Approx(1.959963984540054 / 10).epsilon(1e-12));
    CHECK(ci[1].estimate == -1.0);

    const auto twice = confidence_intervals(r, 2.0, 0.95, 100);
    CHECK(twice[0].hi - twice[0].lo == doctest::Approx(2.0 * (ci[0].hi - ci[0].lo)).epsilon(1e-15));

    const auto narrow = confidence_intervals(r, 1.0, 1e-9, 100);
    CHECK(narrow[0].hi - narrow[0].lo <= 1e-9);
    CHECK_THROWS_AS(confidence_intervals(r, 1.0, 1.0, 100), InvalidInput);

    std::ostringstream os;
    write_ci_csv(os, ci, Vector{{0.3, 5.0}});
    const std::string s = os.str();
    CHECK(s.rfind("index,estimate,lo,hi,level,covered\n", 0) == 0);
    CHECK(s.find(",1\n") != std::string::npos);
    CHECK(s.find(",0\n") != std::string::npos);
}

TEST_CASE("variance bound on estimated rows")
{
    const Dataset d = small_data(1.0, 2);
    const Matrix S = sample_covariance(d.X);
    const auto t = inference_thresholds(default_lambdas(1.0, 60, 4, 5, 5, 1, 0.3).lambda, 60, 1.0, 5, 1);
    const Matrix M = estimate_M(S, d.partition, t.alpha, t.gamma);
    const Matrix M2 = estimate_M(S, d.partition, t.alpha, t.gamma, {}, 3);
    CHECK(M == M2);
    const MRowSolver solver(S, d.partition);
    for (Index i = 0; i < 20; ++i) CHECK(solver.violation(M.row(i).transpose(), i, t.alpha, t.gamma) <= 1e-6);
    const auto r = debias(d, *d.beta_truth, M, t.alpha, t.gamma);
    CHECK(variance_bound_slack(r, S) >= -1e-6);
    for (Index i = 0; i < 20; ++i) {
        const double bound = std::pow(std::max(0.0, 1 - t.alpha - t.gamma), 2) / S(i, i);
        CHECK(r.variances[i] >= bound - 1e-6);
    }
}
