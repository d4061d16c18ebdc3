#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cc4oc/linalg.hpp"
#include "dense_oracle.hpp"

using namespace cc4oc;

namespace {

TridiagonalSystem random_dominant(std::mt19937_64& rng, std::size_t n, double margin = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TridiagonalSystem s;
    s.lower.resize(n);
    s.diag.resize(n);
    s.upper.resize(n);
    s.rhs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.lower[i] = u(rng);
        s.upper[i] = u(rng);
        const double sign = u(rng) < 0.0 ? -1.0 : 1.0;
        s.diag[i] = sign * (std::abs(s.lower[i]) + std::abs(s.upper[i]) + margin + std::abs(u(rng)));
        s.rhs[i] = 10.0 * u(rng);
    }
    return s;
}

double rel_err(const std::vector<double>& x, const std::vector<double>& ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num = std::max(num, std::abs(x[i] - ref[i]));
        den = std::max(den, std::abs(ref[i]));
    }
    return num / std::max(den, 1e-300);
}

}  // namespace

TEST(Tridiagonal, TwoByTwoMatchesInverse) {
    // [[4, 1], [2, 3]] x = [1, 2]  ->  x = (1/10) [3 - 2, -2 + 8]
    TridiagonalSystem s{{0.0, 2.0}, {4.0, 3.0}, {1.0, 0.0}, {1.0, 2.0}};
    const auto x = solve_tridiagonal(s);
    EXPECT_NEAR(x[0], 0.1, 1e-15);
    EXPECT_NEAR(x[1], 0.6, 1e-15);
}

TEST(Tridiagonal, ThreeByThreeExample) {
    // [[2, 1, 0], [1, 2, 1], [0, 1, 2]] x = [1, 0, 1]  ->  x = [1, -1, 1]
    TridiagonalSystem s{{0.0, 1.0, 1.0}, {2.0, 2.0, 2.0}, {1.0, 1.0, 0.0}, {1.0, 0.0, 1.0}};
    const auto x = solve_tridiagonal(s);
    EXPECT_NEAR(x[0], 1.0, 1e-14);
    EXPECT_NEAR(x[1], -1.0, 1e-14);
    EXPECT_NEAR(x[2], 1.0, 1e-14);
}

TEST(Tridiagonal, IdentityReturnsRhs) {
    TridiagonalSystem s{{0, 0, 0, 0}, {1, 1, 1, 1}, {0, 0, 0, 0}, {3, -1, 2, 7}};
    EXPECT_EQ(solve_tridiagonal(s), s.rhs);
}

TEST(Tridiagonal, ZeroPivotThrows) {
    TridiagonalSystem s{{0, 1, 1}, {0, 1, 1}, {1, 1, 0}, {1, 1, 1}};
    EXPECT_THROW(solve_tridiagonal(s), SingularMatrixError);
}

TEST(Tridiagonal, ShapeErrors) {
    TridiagonalSystem s{{0}, {1}, {0}, {1}};
    EXPECT_THROW(solve_tridiagonal(s), std::invalid_argument);
    TridiagonalSystem t{{0, 1}, {1, 1, 1}, {1, 0}, {1, 1}};
    EXPECT_THROW(solve_tridiagonal(t), std::invalid_argument);
}

TEST(Tridiagonal, MatchesDenseEliminationOnRandomSystems) {
    std::mt19937_64 rng(20231);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 63;
        const auto s = random_dominant(rng, n);
        const auto ref = oracle::dense_solve(oracle::dense_from_tridiagonal(s, 0.0, 0.0), s.rhs);
        EXPECT_LE(rel_err(solve_tridiagonal(s), ref), 1e-10) << "n = " << n;
    }
}

TEST(CyclicTridiagonal, MatchesDenseEliminationOnRandomSystems) {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng() % 62;
        auto s = random_dominant(rng, n, 2.0);
        const double cl = u(rng), cu = u(rng);
        const auto dense = oracle::dense_from_tridiagonal(s, cl, cu);
        const auto ref = oracle::dense_solve(dense, s.rhs);
        const auto x = solve_cyclic_tridiagonal(s, cl, cu);
        EXPECT_LE(rel_err(x, ref), 1e-10) << "n = " << n;

        // Residual of the full cyclic system.
        const auto r = oracle::residual(dense, x, s.rhs);
        double rhs_inf = 0.0;
        for (double v : s.rhs) rhs_inf = std::max(rhs_inf, std::abs(v));
        EXPECT_LE(r, 1e-12 * std::max(1.0, rhs_inf));
    }
}

TEST(CyclicTridiagonal, ZeroCornersEqualPlainSolve) {
    std::mt19937_64 rng(5);
    const auto s = random_dominant(rng, 17);
    EXPECT_EQ(solve_cyclic_tridiagonal(s, 0.0, 0.0), solve_tridiagonal(s));
}

TEST(CyclicTridiagonal, PadePeriodicMatrixOnSine) {
    // (1/6, 2/3, 1/6) circulant applied to the exact derivative of a resolved sine wave
    // reproduces the central difference up to the compact truncation error.
    const int m = 32;
    const double h = 2.0 * M_PI / m;
    TridiagonalSystem s;
    s.lower.assign(m, 1.0 / 6.0);
    s.diag.assign(m, 2.0 / 3.0);
    s.upper.assign(m, 1.0 / 6.0);
    s.rhs.resize(m);
    for (int i = 0; i < m; ++i) s.rhs[i] = (std::sin((i + 1) * h) - std::sin((i - 1) * h)) / (2.0 * h);
    const auto x = solve_cyclic_tridiagonal(s, 1.0 / 6.0, 1.0 / 6.0);
    for (int i = 0; i < m; ++i) EXPECT_NEAR(x[i], std::cos(i * h), 1e-4);
}

TEST(CyclicTridiagonal, TooSmallThrows) {
    TridiagonalSystem s{{1, 1}, {4, 4}, {1, 1}, {1, 1}};
    EXPECT_THROW(solve_cyclic_tridiagonal(s, 1.0, 1.0), std::invalid_argument);
}

TEST(Bicgstab, IdentityConvergesAtOnce) {
    LinearOperator id{[](std::span<const double> x, std::span<double> y) {
                          std::copy(x.begin(), x.end(), y.begin());
                      },
                      4};
    const std::vector<double> b{1, 2, 3, 4};
    const auto r = bicgstab(id, b, std::vector<double>(4, 0.0), 1e-12, 10);
    EXPECT_TRUE(r.stats.converged);
    EXPECT_LE(r.stats.iterations, 1);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.x[i], b[i], 1e-12);
}

TEST(Bicgstab, ZeroRhsZeroGuessIsImmediate) {
    LinearOperator id{[](std::span<const double> x, std::span<double> y) {
                          std::copy(x.begin(), x.end(), y.begin());
                      },
                      3};
    const auto r = bicgstab(id, std::vector<double>(3, 0.0), std::vector<double>(3, 0.0), 1e-10, 10);
    EXPECT_EQ(r.stats.iterations, 0);
    EXPECT_EQ(r.x, std::vector<double>(3, 0.0));
}

TEST(Bicgstab, RandomNonsymmetricSystemsResidualVerifiedIndependently) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + rng() % 60;
        oracle::Dense a(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            double off = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || (rng() % 4) != 0) continue;
                a[i][j] = u(rng);
                off += std::abs(a[i][j]);
            }
            a[i][i] = off + 1.0;
        }
        std::vector<double> b(n);
        for (double& v : b) v = u(rng);
        LinearOperator op{[&](std::span<const double> x, std::span<double> y) {
                              for (std::size_t i = 0; i < n; ++i) {
                                  double s = 0.0;
                                  for (std::size_t j = 0; j < n; ++j) s += a[i][j] * x[j];
                                  y[i] = s;
                              }
                          },
                          n};
        const auto r = bicgstab(op, b, std::vector<double>(n, 0.0), 1e-10, 1000);
        ASSERT_TRUE(r.stats.converged);
        EXPECT_LE(r.stats.final_residual_norm, 1e-10);
        EXPECT_LE(oracle::residual2(a, r.x, b), 1e-10);
        const auto ref = oracle::dense_solve(a, b);
        EXPECT_LE(rel_err(r.x, ref), 1e-8);
    }
}

TEST(Bicgstab, RotationBreaksDown) {
    // r_hat^T A r_hat = 0 for a rotation, so alpha's denominator vanishes on the first step.
    LinearOperator rot{[](std::span<const double> x, std::span<double> y) {
                           y[0] = -x[1];
                           y[1] = x[0];
                       },
                       2};
    EXPECT_THROW(bicgstab(rot, std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 0.0}, 1e-12, 50),
                 BreakdownError);
}

TEST(Bicgstab, IterationCapCarriesBestIterate) {
    const std::size_t n = 200;
    LinearOperator lap{[n](std::span<const double> x, std::span<double> y) {
                           for (std::size_t i = 0; i < n; ++i) {
                               y[i] = 2.0 * x[i] - (i > 0 ? x[i - 1] : 0.0) - (i + 1 < n ? x[i + 1] : 0.0);
                           }
                       },
                       n};
    std::vector<double> b(n, 1.0);
    try {
        bicgstab(lap, b, std::vector<double>(n, 0.0), 1e-14, 3);
        FAIL() << "expected NonConvergenceError";
    } catch (const NonConvergenceError& e) {
        EXPECT_EQ(e.iterations, 3);
        EXPECT_EQ(e.best_iterate.size(), n);
        EXPECT_LE(oracle::residual2_op(lap, e.best_iterate, b), std::sqrt(double(n)) + 1e-12);
    }
}

TEST(Bicgstab, RoundOffFloorStopsStagnation) {
    // 1D Laplacian scaled by 1e10: the residual cannot reach 1e-10 in double precision.
    const std::size_t n = 100;
    const double scale = 1e10;
    LinearOperator lap{[=](std::span<const double> x, std::span<double> y) {
                           for (std::size_t i = 0; i < n; ++i) {
                               y[i] = scale * (2.0 * x[i] - (i > 0 ? x[i - 1] : 0.0) - (i + 1 < n ? x[i + 1] : 0.0));
                           }
                       },
                       n};
    std::vector<double> b(n, scale);
    EXPECT_THROW(bicgstab(lap, b, std::vector<double>(n, 0.0), 1e-10, 2000), NonConvergenceError);

    const double floor_scale = std::numeric_limits<double>::epsilon() * 4.0 * scale;
    const auto r = bicgstab(lap, b, std::vector<double>(n, 0.0), 1e-10, 2000, floor_scale);
    ASSERT_TRUE(r.stats.converged);
    double xn = 0.0;
    for (double v : r.x) xn += v * v;
    EXPECT_LE(oracle::residual2_op(lap, r.x, b), floor_scale * std::sqrt(xn));
    // x_i = (i + 1)(n - i) / 2
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(r.x[i], 0.5 * (i + 1.0) * (n - i), 1e-6 * n * n);
}

TEST(Bicgstab, DimensionMismatchThrows) {
    LinearOperator id{[](std::span<const double> x, std::span<double> y) {
                          std::copy(x.begin(), x.end(), y.begin());
                      },
                      3};
    EXPECT_THROW(bicgstab(id, std::vector<double>(2, 0.0), std::vector<double>(3, 0.0), 1e-10, 10),
                 std::invalid_argument);
}

TEST(Bicgstab, Deterministic) {
    const std::size_t n = 50;
    LinearOperator op{[n](std::span<const double> x, std::span<double> y) {
                          for (std::size_t i = 0; i < n; ++i) {
                              y[i] = 3.0 * x[i] - (i > 0 ? 1.2 * x[i - 1] : 0.0) - (i + 1 < n ? 0.7 * x[i + 1] : 0.0);
                          }
                      },
                      n};
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = std::sin(0.3 * i);
    const auto r1 = bicgstab(op, b, std::vector<double>(n, 0.0), 1e-12, 500);
    const auto r2 = bicgstab(op, b, std::vector<double>(n, 0.0), 1e-12, 500);
    EXPECT_EQ(r1.x, r2.x);
    EXPECT_EQ(r1.stats.iterations, r2.stats.iterations);
}
