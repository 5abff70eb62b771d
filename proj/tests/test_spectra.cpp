#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmtprod/chain.hpp"
#include "rmtprod/spectra.hpp"

using namespace rmtprod;

namespace {

Eigen::Matrix2d rotation(double t) {
    Eigen::Matrix2d r;
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return r;
}

} // namespace

TEST(Eigenvalues, DiagonalComplex) {
    CMatrix m = CMatrix::Zero(3, 3);
    m(0, 0) = cplx(1, 2);
    m(1, 1) = 3.0;
    m(2, 2) = cplx(0, -1);
    const SpectrumSample s = eigenvalues(DenseMatrix(m, complex_class));
    ASSERT_EQ(s.eigenvalues.size(), 3u);
    EXPECT_EQ(s.zero_modes, 0u);
    std::vector<double> mods;
    for (const cplx& z : s.eigenvalues) mods.push_back(std::abs(z));
    std::sort(mods.begin(), mods.end());
    EXPECT_NEAR(mods[0], 1.0, 1e-14);
    EXPECT_NEAR(mods[1], std::sqrt(5.0), 1e-14);
    EXPECT_NEAR(mods[2], 3.0, 1e-14);
}

TEST(Eigenvalues, RealMatrixConjugatePairs) {
    CMatrix m(2, 2);
    m << 0.0, -2.0, 2.0, 0.0;
    const SpectrumSample s = eigenvalues(DenseMatrix(m, real_class));
    ASSERT_EQ(s.eigenvalues.size(), 2u);
    EXPECT_NEAR(std::abs(s.eigenvalues[0].imag()), 2.0, 1e-14);
    EXPECT_NEAR(s.eigenvalues[0].imag(), -s.eigenvalues[1].imag(), 1e-14);
}

TEST(Eigenvalues, QuaternionRepresentativesInUpperHalfPlane) {
    SeededStream st(3);
    const DenseMatrix x = sample_ginibre(5, 5, quaternion_class, st);
    const SpectrumSample s = eigenvalues(x);
    ASSERT_EQ(s.eigenvalues.size(), 5u);
    for (const cplx& z : s.eigenvalues) EXPECT_GE(z.imag(), 0.0);
    // each representative and its conjugate appear in the stored spectrum
    const auto all = stored_eigenvalues(x.entries, false);
    for (const cplx& z : s.eigenvalues) {
        double d = 1e300, dc = 1e300;
        for (const cplx& w : all) {
            d = std::min(d, std::abs(w - z));
            dc = std::min(dc, std::abs(w - std::conj(z)));
        }
        EXPECT_LT(std::max(d, dc), 1e-10);
    }
}

TEST(Eigenvalues, RejectsNonSquare) {
    EXPECT_THROW(eigenvalues(DenseMatrix(CMatrix::Zero(2, 3), complex_class)), std::invalid_argument);
}

TEST(ZeroModes, RankDeficientProduct) {
    ChainSpec spec{complex_class, {FactorSpec::ginibre(5, 8), FactorSpec::ginibre(8, 5)}};
    SeededStream s(4);
    const SpectrumSample sp = spectrum(sample_chain(spec, s).product);
    EXPECT_EQ(sp.zero_modes, 3u);
    EXPECT_EQ(sp.nonzero().size(), 5u);
}

TEST(SingularValues, DescendingAndQuaternionDeduplicated) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = cplx(0.0, -4.0);
    const auto sv = singular_values(DenseMatrix(m, complex_class));
    ASSERT_EQ(sv.size(), 2u);
    EXPECT_NEAR(sv[0], 4.0, 1e-14);
    EXPECT_NEAR(sv[1], 1.0, 1e-14);
    SeededStream st(5);
    EXPECT_EQ(singular_values(sample_ginibre(4, 3, quaternion_class, st)).size(), 3u);
}

TEST(Lyapunov, MeanAndStandardError) {
    SpectrumSample s;
    s.eigenvalues = {cplx(1.0, 0.0), cplx(0.0, std::exp(1.0)), cplx(std::exp(2.0), 0.0)};
    const LyapunovEstimate e = lyapunov_estimate({s});
    EXPECT_EQ(e.count, 3u);
    EXPECT_NEAR(e.mean, 1.0, 1e-14);
    EXPECT_NEAR(e.standard_error, 1.0 / std::sqrt(3.0), 1e-14);
    EXPECT_THROW(lyapunov_estimate({}), std::invalid_argument);
}

TEST(TwoByTwo, KnownRotationScaling) {
    // R(0.7) diag(3, 1) R(-0.2): phi = 0.5, s = +1
    const Eigen::Matrix2d z = rotation(0.7) * Eigen::Vector2d(3.0, 1.0).asDiagonal() * rotation(-0.2);
    const TwoByTwoData d = decompose_2x2(z);
    EXPECT_NEAR(d.lambda1, 3.0, 1e-13);
    EXPECT_NEAR(d.lambda2, 1.0, 1e-13);
    EXPECT_EQ(d.s, 1);
    EXPECT_NEAR(d.phi, 0.5, 1e-13);
}

TEST(TwoByTwo, NegativeDeterminantHasRealEigenvalues) {
    Eigen::Matrix2d z;
    z << 1.0, 2.0, 3.0, -0.5;
    const TwoByTwoData d = decompose_2x2(z);
    EXPECT_EQ(d.s, -1);
    const auto [a, b] = eig_from_singular_2x2(d);
    EXPECT_EQ(a.imag(), 0.0);
    EXPECT_EQ(b.imag(), 0.0);
    // roots of t^2 - 0.5 t - 6.5
    const double r = std::sqrt(0.0625 + 6.5);
    EXPECT_NEAR(std::max(a.real(), b.real()), 0.25 + r, 1e-13);
    EXPECT_NEAR(std::min(a.real(), b.real()), 0.25 - r, 1e-13);
}

TEST(TwoByTwo, RoundTripRandom) {
    SeededStream s(6);
    for (int k = 0; k < 2000; ++k) {
        Eigen::Matrix2d z;
        for (int i = 0; i < 4; ++i) z(i / 2, i % 2) = s.normal();
        const auto [a, b] = eig_from_singular_2x2(decompose_2x2(z));
        EXPECT_NEAR((a + b).real(), z.trace(), 1e-11);
        EXPECT_NEAR((a * b).real(), z.determinant(), 1e-11);
        EXPECT_NEAR((a + b).imag(), 0.0, 1e-11);
    }
}

TEST(TwoByTwo, RejectsInvalidInput) {
    TwoByTwoData d;
    d.lambda1 = 1.0;
    d.lambda2 = 2.0;
    EXPECT_THROW(eig_from_singular_2x2(d), std::invalid_argument);
    d.lambda2 = 0.5;
    d.s = 0;
    EXPECT_THROW(eig_from_singular_2x2(d), std::invalid_argument);
    EXPECT_THROW(singular_from_eig_2x2(cplx(1, 1), cplx(2, 0), 1.0), std::invalid_argument);
}
