#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rmtprod/finite_beta2.hpp"
#include "rmtprod/macro.hpp"
#include "rmtprod/weights.hpp"

using namespace rmtprod;

namespace {

template <class F>
double integrate(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-12);
}

} // namespace

TEST(Macro, FromDerivedIndices) {
    ChainSpec s{complex_class, {FactorSpec::ginibre(10, 10), FactorSpec::jacobi(10, 10, 30)}};
    const MacroModel m = macro_model(derive_indices(s));
    EXPECT_EQ(m.m1, 1u);
    EXPECT_EQ(m.m2, 1u);
    EXPECT_DOUBLE_EQ(m.nu_hat[1], 0.0);
    EXPECT_DOUBLE_EQ(m.mu_hat[0], 2.0);  // (L - N_min) / N_min
}

TEST(Macro, Validation) {
    EXPECT_THROW((MacroModel{{}, {}, 0, 0}.validate()), std::invalid_argument);
    EXPECT_THROW((MacroModel{{0.5}, {0.5}, 0, 1}.validate()), std::invalid_argument);
}

TEST(Macro, UnitDiskIsFlat) {
    const MacroModel m{{0.0}, {}, 1, 0};
    for (double r : {0.1, 0.5, 0.99}) EXPECT_NEAR(macro_density(m, r), 1.0 / std::numbers::pi, 1e-12);
    EXPECT_EQ(macro_density(m, 1.01), 0.0);
    const auto [a, b] = annulus_radii(m);
    EXPECT_EQ(a, 0.0);
    EXPECT_EQ(b, 1.0);
}

TEST(Macro, InducedAnnulusRadii) {
    // R(y) = (1 + y)(2 + y)
    const MacroModel m{{1.0, 2.0}, {}, 2, 0};
    const auto [a, b] = annulus_radii(m);
    EXPECT_NEAR(a, std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(b, std::sqrt(6.0), 1e-14);
    EXPECT_NEAR(integrate([&](double r) { return macro_radial_density(m, r); }, a, b), 1.0, 1e-9);
}

TEST(Macro, ProductOfTwoGinibreDensity) {
    // R(y) = y^2, so rho(r) = 1 / (2 pi r)
    const MacroModel m{{0.0, 0.0}, {}, 2, 0};
    for (double r : {0.2, 0.7}) EXPECT_NEAR(macro_density(m, r), 1.0 / (2.0 * std::numbers::pi * r), 1e-10);
}

TEST(Macro, JacobiSupportAndNormalisation) {
    const MacroModel m{{0.0, 0.5}, {1.5}, 1, 1};
    const auto [a, b] = annulus_radii(m);
    EXPECT_EQ(a, 0.0);
    EXPECT_NEAR(b, std::sqrt(1.5 / 2.5), 1e-14);
    EXPECT_NEAR(integrate([&](double r) { return macro_radial_density(m, r); }, 0.0, b), 1.0, 1e-8);
}

TEST(Macro, MomentsMatchDensity) {
    const MacroModel m{{0.3, 1.0}, {2.0}, 1, 1};
    const auto [a, b] = annulus_radii(m);
    for (std::size_t k : {1u, 2u, 3u}) {
        const double direct = integrate(
            [&](double r) { return std::pow(r, 2.0 * static_cast<double>(k)) * macro_radial_density(m, r); }, a, b);
        EXPECT_NEAR(macro_moment(m, k), direct, 1e-8);
    }
    EXPECT_NEAR(macro_moment(MacroModel{{0.0}, {}, 1, 0}, 2), 1.0 / 3.0, 1e-14);
}

TEST(Macro, GreenFunctionSolvesEquation) {
    const MacroModel m{{0.2, 0.7}, {1.9}, 1, 1};
    const auto [a, b] = annulus_radii(m);
    for (double r : {1.01 * a, 0.5 * (a + b), 0.99 * b}) {
        const cplx z = std::polar(r, 0.8);
        const cplx g = green_function(m, z);
        EXPECT_NEAR(rational_R(m, (z * g).real()), std::norm(z), 1e-12);
        EXPECT_NEAR((z * g).imag(), 0.0, 1e-14);
    }
    EXPECT_THROW(green_function(m, cplx(2.0 * b, 0.0)), std::domain_error);
}

TEST(Macro, RationalDerivative) {
    const MacroModel m{{0.0, 0.4}, {1.2}, 1, 1};
    for (double y : {0.0, 0.3, 0.8}) {
        const double h = 1e-6;
        const double fd = (rational_R(m, y + h) - rational_R(m, std::max(0.0, y - h))) / (y > 0 ? 2 * h : h);
        EXPECT_NEAR(rational_R_prime(m, y), fd, 1e-6);
    }
}

TEST(Macro, LyapunovUnitDisk) {
    // (1/2) int_0^1 ln y dy = -1/2, plus (1/2) ln N for the unscaled eigenvalues
    const MacroModel m{{0.0}, {}, 1, 0};
    EXPECT_NEAR(lyapunov_macro(m, 100, 1), -0.5 + 0.5 * std::log(100.0), 1e-12);
    // large-N agreement with the exact finite-N value
    EXPECT_NEAR(lyapunov_macro(m, 400, 1), lyapunov_finite(WeightModel{{0.0}, {}, 1, 0}, 400), 0.01);
}

TEST(Macro, LyapunovPureJacobiIgnoresNmin) {
    const MacroModel m{{0.0}, {1.0}, 0, 1};
    EXPECT_EQ(lyapunov_macro(m, 5, 0), lyapunov_macro(m, 5000, 0));
    // (1/2) int_0^1 ln(y / (1 + y)) dy = -ln 2
    EXPECT_NEAR(lyapunov_macro(m, 5, 0), -std::log(2.0), 1e-12);
}
