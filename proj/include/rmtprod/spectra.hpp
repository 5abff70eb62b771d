#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dense.hpp"

namespace rmtprod {

inline constexpr double zero_mode_eig_tol = 1e-8;
inline constexpr double zero_mode_sv_tol = 1e-10;

struct SpectrumSample {
    std::vector<cplx> eigenvalues;      // beta 4: upper half-plane representatives
    std::vector<double> singular_values;
    std::size_t zero_modes = 0;
    DysonClass dyson;

    // Eigenvalues with the zero_modes smallest moduli dropped.
    std::vector<cplx> nonzero() const {
        std::vector<cplx> v = eigenvalues;
        std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
        v.erase(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(zero_modes, v.size())));
        return v;
    }
};

inline std::vector<cplx> stored_eigenvalues(const CMatrix& m, bool real_input) {
    std::vector<cplx> out;
    if (m.rows() == 0) return out;
    if (real_input) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(m.real(), false);
        if (es.info() != Eigen::Success) throw std::runtime_error("real eigensolver did not converge");
        for (Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(es.eigenvalues()(k));
    } else {
        Eigen::ComplexEigenSolver<CMatrix> es(m, false);
        if (es.info() != Eigen::Success) throw std::runtime_error("complex eigensolver did not converge");
        for (Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(es.eigenvalues()(k));
    }
    return out;
}

// Splits 2N eigenvalues into N conjugate pairs and returns one representative
// per pair, averaged with its partner and placed in the closed upper half-plane.
inline std::vector<cplx> pair_representatives(std::vector<cplx> all) {
    std::sort(all.begin(), all.end(), [](cplx a, cplx b) { return a.imag() > b.imag(); });
    const std::size_t n = all.size() / 2;
    std::vector<cplx> upper(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<cplx> lower(all.begin() + static_cast<std::ptrdiff_t>(n), all.end());
    std::vector<bool> used(lower.size(), false);
    std::vector<cplx> rep;
    rep.reserve(n);
    for (const cplx& z : upper) {
        std::size_t best = 0;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < lower.size(); ++k) {
            if (used[k]) continue;
            const double dk = std::abs(z - std::conj(lower[k]));
            if (dk < dist) { dist = dk; best = k; }
        }
        used[best] = true;
        const cplx avg = 0.5 * (z + std::conj(lower[best]));
        rep.emplace_back(avg.real(), std::max(0.0, avg.imag()));
    }
    return rep;
}

inline std::size_t count_small(const std::vector<cplx>& z, double rel_tol) {
    double radius = 0.0;
    for (const auto& v : z) radius = std::max(radius, std::abs(v));
    std::size_t c = 0;
    for (const auto& v : z)
        if (std::abs(v) <= rel_tol * radius || radius == 0.0) ++c;
    return c;
}

inline SpectrumSample eigenvalues(const DenseMatrix& m) {
    if (!m.is_square()) throw std::invalid_argument("eigenvalues of a non-square matrix");
    SpectrumSample s;
    s.dyson = m.dyson;
    std::vector<cplx> all = stored_eigenvalues(m.entries, m.dyson.is_real());
    s.eigenvalues = m.dyson.is_quaternion() ? pair_representatives(std::move(all)) : std::move(all);
    s.zero_modes = count_small(s.eigenvalues, zero_mode_eig_tol);
    return s;
}

// Descending; for beta 4 each Kramers-degenerate pair is reported once.
inline std::vector<double> singular_values(const DenseMatrix& m) {
    std::vector<double> out;
    if (m.entries.size() == 0) return out;
    Eigen::VectorXd sv;
    if (m.dyson.is_real()) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(m.entries.real());
        sv = svd.singularValues();
    } else {
        Eigen::BDCSVD<CMatrix> svd(m.entries);
        sv = svd.singularValues();
    }
    const Index g = m.dyson.gamma();
    for (Index k = 0; k < sv.size(); k += g) out.push_back(sv(k));
    return out;
}

inline std::size_t rank_deficiency(const std::vector<double>& sv, std::size_t logical_size) {
    const double smax = sv.empty() ? 0.0 : sv.front();
    std::size_t rank = 0;
    for (double v : sv)
        if (v > zero_mode_sv_tol * smax) ++rank;
    return logical_size - rank;
}

inline SpectrumSample spectrum(const DenseMatrix& m) {
    SpectrumSample s = eigenvalues(m);
    s.singular_values = singular_values(m);
    return s;
}

struct LyapunovEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t count = 0;
};

inline LyapunovEstimate lyapunov_estimate(const std::vector<SpectrumSample>& samples) {
    if (samples.empty()) throw std::invalid_argument("no spectra");
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (const auto& s : samples)
        for (const cplx& z : s.nonzero()) {
            if (z == cplx(0.0)) continue;
            const double l = std::log(std::abs(z));
            sum += l;
            sum2 += l * l;
            ++n;
        }
    if (n == 0) throw std::invalid_argument("all spectra are zero");
    LyapunovEstimate e;
    e.count = n;
    e.mean = sum / static_cast<double>(n);
    if (n > 1) {
        const double var = std::max(0.0, (sum2 - sum * e.mean) / static_cast<double>(n - 1));
        e.standard_error = std::sqrt(var / static_cast<double>(n));
    }
    return e;
}

// 2x2 real matrices Z = R(a) diag(lambda1, s lambda2) R(b) with phi = a + b.
struct TwoByTwoData {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double phi = 0.0;
    int s = 1;
    double alpha = 0.0;
};

inline std::pair<cplx, cplx> eig_from_singular_2x2(const TwoByTwoData& d) {
    if (d.lambda1 < d.lambda2 || d.lambda2 < 0.0)
        throw std::invalid_argument("singular values must satisfy lambda1 >= lambda2 >= 0");
    if (d.s != 1 && d.s != -1) throw std::invalid_argument("sign must be +1 or -1");
    const double half = 0.5 * (d.lambda1 + d.s * d.lambda2) * std::cos(d.phi);
    const cplx root = std::sqrt(cplx(half * half - d.s * d.lambda1 * d.lambda2, 0.0));
    return {half + root, half - root};
}

inline TwoByTwoData decompose_2x2(const Eigen::Matrix2d& z) {
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix2d u = svd.matrixU(), v = svd.matrixV();
    Eigen::Vector2d sig = svd.singularValues();
    double s2 = sig(1);
    if (u.determinant() < 0) { u.col(1) *= -1.0; s2 = -s2; }
    if (v.determinant() < 0) { v.col(1) *= -1.0; s2 = -s2; }
    // z = R(a) diag(sig0, s2) R(-b) with u = R(a), v = R(b)
    const double a = std::atan2(u(1, 0), u(0, 0));
    const double b = std::atan2(v(1, 0), v(0, 0));
    double phi = std::remainder(a - b, 2.0 * std::numbers::pi);
    TwoByTwoData d;
    d.lambda1 = sig(0);
    d.lambda2 = std::abs(s2);
    d.s = s2 < 0 ? -1 : 1;
    d.phi = std::abs(phi);
    return d;
}

inline std::pair<double, double> singular_from_eig_2x2(cplx z1, cplx z2, double alpha) {
    constexpr double tol = 1e-12;
    const double scale = std::max({1.0, std::abs(z1), std::abs(z2)});
    const bool both_real = std::abs(z1.imag()) <= tol * scale && std::abs(z2.imag()) <= tol * scale;
    const bool conj_pair = std::abs(z1 - std::conj(z2)) <= tol * scale;
    if (!both_real && !conj_pair) throw std::invalid_argument("eigenvalues must be real or a conjugate pair");
    if (alpha < 0.5 * std::abs((z1 - z2).imag()) * (1.0 - 1e-12))
        throw std::invalid_argument("alpha below |Im(z1 - z2)| / 2");
    const cplx p = std::sqrt(0.25 * (z1 + z2) * (z1 + z2) + alpha * alpha);
    const cplx q = std::sqrt(0.25 * (z1 - z2) * (z1 - z2) + alpha * alpha);
    const double l1 = std::abs(p + q), l2 = std::abs(p - q);
    return {std::max(l1, l2), std::min(l1, l2)};
}

} // namespace rmtprod
