#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wgm/constants.hpp"
#include "wgm/numeric.hpp"

using namespace wgm;

TEST(FindRoot, CubicRootToMachinePrecision) {
    const double r = find_root([](double x) { return x * x * x - 2.0; }, 0.0, 2.0);
    EXPECT_NEAR(r, std::cbrt(2.0), 4e-16);
}

TEST(FindRoot, ReversedBracketAndEndpointRoot) {
    EXPECT_NEAR(find_root([](double x) { return std::cos(x); }, 3.0, 0.0), kPi / 2, 1e-15);
    EXPECT_EQ(find_root([](double x) { return x - 1.0; }, 1.0, 4.0), 1.0);
}

TEST(FindRoot, ThrowsWithoutSignChange) {
    EXPECT_THROW((void)find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), NoRootError);
}

TEST(ExpandBracket, GrowsUntilSignChange) {
    const auto [a, b] = expand_bracket([](double x) { return x - 10.0; }, 0.0, 0.5, -100.0, 100.0);
    EXPECT_LE(a, 10.0);
    EXPECT_GE(b, 10.0);
    EXPECT_THROW((void)expand_bracket([](double x) { return x - 10.0; }, 0.0, 0.5, -5.0, 5.0), NoRootError);
}

TEST(Integrate, PolynomialIsExact) {
    const auto r = integrate([](double x) { return 3 * x * x; }, 0.0, 2.0);
    EXPECT_NEAR(r.value, 8.0, 1e-14);
}

TEST(Integrate, LorentzianWithBreakpoints) {
    // integral of 1/(1+(x/g)^2) over the real line is pi g; the tail beyond +-L is 2 g atan(g/L)
    const double g = 1e-4, big = 1.0;
    const auto r = integrate([&](double x) { return 1.0 / (1.0 + x * x / (g * g)); }, -big, big, {-g, 0.0, g});
    const double exact = 2.0 * g * std::atan(big / g);
    EXPECT_NEAR(r.value / exact, 1.0, 1e-9);
}

TEST(Integrate, Deterministic) {
    auto f = [](double x) { return std::exp(-x * x) * std::cos(5 * x); };
    EXPECT_EQ(integrate(f, -3, 3).value, integrate(f, -3, 3).value);
}

TEST(SampledFwhm, GaussianAndErrors) {
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(2001, -5, 5);
    const Eigen::VectorXd y = (-0.5 * x.array().square()).exp();
    EXPECT_NEAR(sampled_fwhm(x, y), 2.0 * std::sqrt(2.0 * std::log(2.0)), 1e-4);
    EXPECT_NEAR(sampled_width_at(x, y, std::exp(-0.5)), 2.0, 1e-4);
    const Eigen::VectorXd half = x.head(1000);
    const Eigen::VectorXd yh = (-0.5 * half.array().square()).exp() + 1.0;
    EXPECT_THROW((void)sampled_fwhm(half, yh), PreconditionError);
}

TEST(Pchip, InterpolatesKnotsAndStaysMonotone) {
    const std::vector<double> x{0, 1, 2, 3, 4}, y{0, 0.1, 0.9, 1.0, 1.0};
    const Pchip p(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(p(x[i]), y[i]);
    double prev = -1.0;
    for (double t = -1.0; t <= 5.0; t += 0.01) {
        const double v = p(t);
        EXPECT_GE(v, prev - 1e-15);
        EXPECT_LE(v, 1.0 + 1e-15);
        prev = v;
    }
}

TEST(Misc, MedianAndPow2) {
    EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
    EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
    EXPECT_EQ(next_pow2(1), 1u);
    EXPECT_EQ(next_pow2(1000), 1024u);
    EXPECT_EQ(next_pow2(1024), 1024u);
}

TEST(ParallelFor, ResultIndependentOfThreadCount) {
    std::vector<double> a(1000), b(1000);
    parallel_for(a.size(), 1, [&](std::size_t i) { a[i] = std::sin(static_cast<double>(i)); });
    parallel_for(b.size(), 4, [&](std::size_t i) { b[i] = std::sin(static_cast<double>(i)); });
    EXPECT_EQ(a, b);
}

TEST(ParallelFor, PropagatesExceptions) {
    EXPECT_THROW(parallel_for(10, 2,
                              [](std::size_t i) {
                                  if (i == 7) throw DomainError("boom");
                              }),
                 DomainError);
}
