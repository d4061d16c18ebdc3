#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cc4oc/pade.hpp"

using namespace cc4oc;

namespace {

double max_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
    return m;
}

DerivativeClosure exact_closure(const SpaceTimeFunction& d) {
    return {EndMode::ExactValue, EndMode::ExactValue, d, d};
}

const DerivativeClosure one_sided{};

}  // namespace

TEST(Pade, ConstantHasZeroDerivative) {
    const auto g = make_grid(9, 7, 0, 0, 1, 1);
    const ScalarField f(g, 3.0);
    EXPECT_LE(max_diff(pade_dx(f, one_sided, 0.0), ScalarField(g)), 1e-12);
    EXPECT_LE(max_diff(pade_dy(f, one_sided, 0.0), ScalarField(g)), 1e-12);
}

TEST(Pade, PolynomialsThroughDegreeFourAreExactWithExactEnds) {
    const auto g = make_grid(11, 9, -0.3, 0.1, 1.7, 1.1);
    for (int p = 0; p <= 4; ++p) {
        const SpaceTimeFunction fx = [p](double x, double y, double) { return std::pow(x, p) * (1.0 + y); };
        const SpaceTimeFunction dfx = [p](double x, double y, double) {
            return p == 0 ? 0.0 : p * std::pow(x, p - 1) * (1.0 + y);
        };
        const SpaceTimeFunction fy = [p](double x, double y, double) { return std::pow(y, p) * (2.0 - x); };
        const SpaceTimeFunction dfy = [p](double x, double y, double) {
            return p == 0 ? 0.0 : p * std::pow(y, p - 1) * (2.0 - x);
        };
        EXPECT_LE(max_diff(pade_dx(sample(g, fx, 0), exact_closure(dfx), 0), sample(g, dfx, 0)), 1e-10) << p;
        EXPECT_LE(max_diff(pade_dy(sample(g, fy, 0), exact_closure(dfy), 0), sample(g, dfy, 0)), 1e-10) << p;
    }
}

TEST(Pade, OneSidedClosureExactThroughCubics) {
    const auto g = make_grid(13, 5, 0, 0, 1, 1);
    for (int p = 0; p <= 3; ++p) {
        const SpaceTimeFunction f = [p](double x, double, double) { return std::pow(x, p); };
        const SpaceTimeFunction df = [p](double x, double, double) { return p == 0 ? 0.0 : p * std::pow(x, p - 1); };
        EXPECT_LE(max_diff(pade_dx(sample(g, f, 0), one_sided, 0), sample(g, df, 0)), 1e-10) << p;
    }
}

TEST(Pade, FourthOrderRatioOnSine) {
    const SpaceTimeFunction f = [](double x, double y, double) { return std::sin(2.0 * x) * std::cos(y); };
    const SpaceTimeFunction dfx = [](double x, double y, double) { return 2.0 * std::cos(2.0 * x) * std::cos(y); };
    double prev = 0.0;
    for (int n : {17, 33, 65}) {
        const auto g = make_grid(n, 9, 0, 0, 2.0, 1.0);
        const double err = max_diff(pade_dx(sample(g, f, 0), exact_closure(dfx), 0), sample(g, dfx, 0));
        if (prev > 0.0) {
            const double ratio = prev / err;
            EXPECT_GE(ratio, 14.0);
            EXPECT_LE(ratio, 18.0);
        }
        prev = err;
    }
}

TEST(Pade, PeriodicSineSpectralIdentity) {
    // For e^{i theta j} the interior Pade symbol is 3 sin(theta) / (h (2 + cos theta)).
    const int n = 33;
    const auto g = make_grid(n, 5, 0, 0, 2.0 * M_PI, 1.0);
    const DerivativeClosure per{EndMode::Periodic, EndMode::Periodic, {}, {}};
    for (int m : {1, 3, 7}) {
        const auto f = sample(g, [m](double x, double, double) { return std::sin(m * x); }, 0);
        const auto d = pade_dx(f, per, 0);
        const double theta = m * g.h;
        const double symbol = 3.0 * std::sin(theta) / (g.h * (2.0 + std::cos(theta)));
        for (int i = 0; i < n; ++i) EXPECT_NEAR(d(i, 2), symbol * std::cos(m * g.x(i)), 1e-12);
    }
}

TEST(Pade, PeriodicDuplicateMatchesFirst) {
    const auto g = make_grid(17, 17, 0, 0, 1, 1);
    const DerivativeClosure per{EndMode::Periodic, EndMode::Periodic, {}, {}};
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx - 1; ++i) f(i, j) = u(rng);
    for (int j = 0; j < g.ny; ++j) f(g.nx - 1, j) = f(0, j);
    const auto d = pade_dx(f, per, 0);
    for (int j = 0; j < g.ny; ++j) EXPECT_EQ(d(g.nx - 1, j), d(0, j));
}

TEST(Pade, SatisfiesInteriorRelation) {
    const auto g = make_grid(12, 6, 0, 0, 1, 1);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    ScalarField f(g);
    for (auto& v : f.data()) v = u(rng);
    const auto d = pade_dy(f, one_sided, 0);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 1; j < g.ny - 1; ++j) {
            const double lhs = d(i, j - 1) / 6 + 2 * d(i, j) / 3 + d(i, j + 1) / 6;
            EXPECT_NEAR(lhs, (f(i, j + 1) - f(i, j - 1)) / (2 * g.k), 1e-12);
        }
}

TEST(Pade, RejectsShortLinesAndMixedClosures) {
    const auto g = make_grid(3, 3, 0, 0, 1, 1);
    EXPECT_THROW(pade_dx(ScalarField(g), one_sided, 0), std::invalid_argument);
    const DerivativeClosure mixed{EndMode::Periodic, EndMode::OneSidedCompact, {}, {}};
    EXPECT_THROW(pade_dx(ScalarField(make_grid(9, 9, 0, 0, 1, 1)), mixed, 0), std::invalid_argument);
    const DerivativeClosure missing{EndMode::ExactValue, EndMode::ExactValue, {}, {}};
    EXPECT_THROW(pade_dx(ScalarField(make_grid(9, 9, 0, 0, 1, 1)), missing, 0), std::invalid_argument);
}

TEST(Pade, ClosureSelectionFromBoundarySpec) {
    const SpaceTimeFunction zero = [](double, double, double) { return 0.0; };
    auto bc = BoundarySpec::dirichlet(zero, zero, {});
    EXPECT_EQ(x_closure(bc).lower, EndMode::ExactValue);
    EXPECT_EQ(y_closure(bc).lower, EndMode::OneSidedCompact);
    EXPECT_EQ(x_closure(BoundarySpec::periodic()).upper, EndMode::Periodic);
}
