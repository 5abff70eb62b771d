#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "special.hpp"
#include "weights.hpp"

namespace rmtprod {

// log of prod Gamma(mu + l + 1) / prod Gamma(nu + l + 1), the inverse norm of z^l
inline double log_inverse_norm(const WeightModel& w, std::size_t l) {
    const double L = static_cast<double>(l);
    double s = 0.0;
    for (double m : w.mu) s += std::lgamma(m + L + 1.0);
    for (double v : w.nu) s -= std::lgamma(v + L + 1.0);
    return s;
}

inline double density_finite_beta2(const WeightModel& w, std::size_t n_min, cplx z) {
    w.validate();
    const double x = std::norm(z);
    const double lg = log_one_point_weight(w, x);
    if (!std::isfinite(lg)) return lg > 0 ? lg : 0.0;
    std::vector<double> terms;
    const double lx = x > 0 ? std::log(x) : 0.0;
    for (std::size_t l = 0; l < n_min; ++l) {
        if (x == 0.0 && l > 0) break;
        terms.push_back(static_cast<double>(l) * lx + log_inverse_norm(w, l));
    }
    return std::exp(lg + special::log_sum_exp(terms)) / std::numbers::pi;
}

// Radial pdf of |z|, 2 pi r rho(r); integrates to n_min over r >= 0.
inline double radial_density_finite_beta2(const WeightModel& w, std::size_t n_min, double r) {
    if (r <= 0.0) return 0.0;  // r rho(r) -> 0 even where g has a log singularity at the origin
    return 2.0 * std::numbers::pi * r * density_finite_beta2(w, n_min, cplx(r, 0.0));
}

inline cplx kernel_beta2(const WeightModel& w, std::size_t n_min, cplx z, cplx w_conj) {
    w.validate();
    const double half_log_g =
        0.5 * (log_one_point_weight(w, std::norm(z)) + log_one_point_weight(w, std::norm(w_conj)));
    const cplx p = z * w_conj;
    if (p == cplx(0.0)) return std::exp(half_log_g + log_inverse_norm(w, 0)) / std::numbers::pi;
    const double lp = std::log(std::abs(p)), arg = std::arg(p);
    double top = -std::numeric_limits<double>::infinity();
    std::vector<double> mags(n_min);
    for (std::size_t l = 0; l < n_min; ++l) {
        mags[l] = static_cast<double>(l) * lp + log_inverse_norm(w, l);
        top = std::max(top, mags[l]);
    }
    cplx s = 0.0;
    for (std::size_t l = 0; l < n_min; ++l)
        s += std::polar(std::exp(mags[l] - top), static_cast<double>(l) * arg);
    return s * std::exp(half_log_g + top) / std::numbers::pi;
}

// <|z|^{2k}> per eigenvalue
inline double moment_finite(const WeightModel& w, std::size_t n_min, std::size_t k) {
    w.validate();
    if (n_min == 0) throw std::invalid_argument("n_min must be positive");
    const double K = static_cast<double>(k);
    double s = 0.0;
    for (std::size_t l = 0; l < n_min; ++l) {
        const double L = static_cast<double>(l);
        double t = 0.0;
        for (double m : w.mu) t += std::lgamma(m + L + 1.0) - std::lgamma(m + L + K + 1.0);
        for (double v : w.nu) t += std::lgamma(v + L + K + 1.0) - std::lgamma(v + L + 1.0);
        s += std::exp(t);
    }
    return s / static_cast<double>(n_min);
}

// <ln|z|> per eigenvalue: half the k-derivative of the moments at k = 0
inline double lyapunov_finite(const WeightModel& w, std::size_t n_min) {
    w.validate();
    using boost::math::digamma;
    double s = 0.0;
    for (std::size_t l = 0; l < n_min; ++l) {
        const double L = static_cast<double>(l);
        for (double v : w.nu) s += digamma(v + L + 1.0);
        for (double m : w.mu) s -= digamma(m + L + 1.0);
    }
    return s / (2.0 * static_cast<double>(n_min));
}

} // namespace rmtprod
