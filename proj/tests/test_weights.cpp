#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

#include "rmtprod/weights.hpp"

using namespace rmtprod;

namespace {

struct Reference {
    double x;
    double log_g;
};

// log G^{M,0}_{m2,M} values from mpmath.meijerg at 25 digits
const Reference ginibre3[] = {{1e-20, 0.28468287047291916},
                              {1e-3, 0.28014178841432051},
                              {0.3, -0.089785075990016481},
                              {2.0, -0.93168989569785688},
                              {40.0, -5.4957830072760605}};
const Reference mixed[] = {{1e-20, -22.738168857754544},
                           {1e-3, -3.250806646893558},
                           {0.3, -1.9405594989123449},
                           {2.0, -4.3532030317910737},
                           {40.0, -45.650639399612681}};
const Reference jacobi3[] = {{1e-6, -6.0344737332718451},
                             {0.01, -6.4981278329378088},
                             {0.3, -11.571324086635878},
                             {0.9, -28.831936768009677}};

} // namespace

TEST(WeightModel, Validation) {
    EXPECT_THROW((WeightModel{{}, {}, 0, 0}.validate()), std::invalid_argument);
    EXPECT_THROW((WeightModel{{-0.5}, {}, 1, 0}.validate()), std::invalid_argument);
    EXPECT_THROW((WeightModel{{2.0}, {1.5}, 0, 1}.validate()), std::invalid_argument);
    EXPECT_THROW((WeightModel{{1.0, 2.0}, {}, 1, 0}.validate()), std::invalid_argument);
}

TEST(Weights, GaussianClosedForm) {
    const WeightModel w{{1.5}, {}, 1, 0};
    for (double x : {1e-8, 0.1, 1.0, 7.0, 60.0}) {
        const double exact = 1.5 * std::log(x) - x;
        EXPECT_NEAR(log_one_point_weight(w, x), exact, 1e-14 * std::max(1.0, std::abs(exact)));
        EXPECT_NEAR(log_one_point_weight(w, x, WeightMethod::contour), exact, 1e-9 * std::max(1.0, std::abs(exact)));
    }
}

TEST(Weights, BesselClosedForm) {
    const WeightModel w{{0.0, 2.0}, {}, 2, 0};
    for (double x : {1e-6, 0.05, 1.0, 10.0, 200.0}) {
        const double exact = 2.0 * x * boost::math::cyl_bessel_k(2.0, 2.0 * std::sqrt(x));
        EXPECT_NEAR(one_point_weight(w, x) / exact, 1.0, 1e-13);
        EXPECT_NEAR(one_point_weight(w, x, WeightMethod::contour) / exact, 1.0, 1e-8);
        EXPECT_NEAR(one_point_weight(w, x, WeightMethod::convolution) / exact, 1.0, 1e-8);
    }
}

TEST(Weights, BesselFarTailStaysFinite) {
    const WeightModel w{{0.0, 1.0}, {}, 2, 0};
    const double x = 1e6;
    // K_1(z) ~ sqrt(pi / (2 z)) e^{-z} (1 + 3 / (8 z)) at z = 2000
    const double z = 2.0 * std::sqrt(x);
    const double approx = std::log(2.0) + 0.5 * std::log(x) + 0.5 * std::log(std::numbers::pi / (2.0 * z)) - z +
                          std::log1p(3.0 / (8.0 * z) - 15.0 / (128.0 * z * z));
    EXPECT_NEAR(log_one_point_weight(w, x), approx, 1e-9);
}

TEST(Weights, BetaClosedForm) {
    const WeightModel w{{0.5}, {3.0}, 0, 1};
    for (double x : {1e-5, 0.2, 0.5, 0.99}) {
        const double exact = 0.5 * std::log(x) + 1.5 * std::log1p(-x) - std::lgamma(2.5);
        EXPECT_NEAR(log_one_point_weight(w, x), exact, 1e-13);
        EXPECT_NEAR(log_one_point_weight(w, x, WeightMethod::convolution), exact, 1e-9);
    }
    EXPECT_EQ(one_point_weight(w, 1.5), 0.0);
}

TEST(Weights, ThreeGinibreAgainstReference) {
    const WeightModel w{{0.0, 1.0, 2.5}, {}, 3, 0};
    for (const auto& r : ginibre3) EXPECT_NEAR(log_one_point_weight(w, r.x), r.log_g, 1e-8) << "x = " << r.x;
}

TEST(Weights, MixedAgainstReference) {
    const WeightModel w{{0.5, 1.0}, {3.0}, 1, 1};
    for (const auto& r : mixed) {
        EXPECT_NEAR(log_one_point_weight(w, r.x), r.log_g, 1e-8) << "x = " << r.x;
        EXPECT_NEAR(log_one_point_weight(w, r.x, WeightMethod::convolution), r.log_g, 1e-8) << "x = " << r.x;
    }
}

TEST(Weights, ThreeJacobiAgainstReference) {
    const WeightModel w{{0.0, 1.0, 2.0}, {2.5, 4.0, 5.5}, 0, 3};
    for (const auto& r : jacobi3) EXPECT_NEAR(log_one_point_weight(w, r.x), r.log_g, 1e-8) << "x = " << r.x;
    EXPECT_EQ(one_point_weight(w, 1.0 + 1e-12), 0.0);
}

TEST(Weights, ValueAtOrigin) {
    // one vanishing nu: residue prod Gamma(nu_j) / prod Gamma(mu_k) over the others
    const WeightModel w{{0.0, 2.0}, {4.0}, 1, 1};
    EXPECT_NEAR(log_one_point_weight(w, 0.0), std::lgamma(2.0) - std::lgamma(4.0), 1e-14);
    EXPECT_EQ(one_point_weight(WeightModel{{1.0}, {}, 1, 0}, 0.0), 0.0);
    EXPECT_TRUE(std::isinf(log_one_point_weight(WeightModel{{0.0, 0.0}, {}, 2, 0}, 0.0)));
    EXPECT_THROW(log_one_point_weight(w, -1.0), std::invalid_argument);
}

TEST(Weights, NormMoments) {
    // Gaussian: pi Gamma(nu + a + 1)
    EXPECT_NEAR(weight_norm_moment(WeightModel{{0.0}, {}, 1, 0}, 0.0), std::numbers::pi, 1e-14);
    EXPECT_NEAR(weight_norm_moment(WeightModel{{1.0}, {}, 1, 0}, 2.0), 6.0 * std::numbers::pi, 1e-12);
    // Beta: pi Gamma(nu + a + 1) / Gamma(mu + a + 1), here pi int_0^1 x (1 - x) dx
    EXPECT_NEAR(weight_norm_moment(WeightModel{{0.0}, {2.0}, 0, 1}, 1.0), std::numbers::pi / 6.0, 1e-14);
    EXPECT_THROW(weight_norm_moment(WeightModel{{0.0}, {}, 1, 0}, -1.0), std::domain_error);
}
