#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "special.hpp"
#include "weights.hpp"

namespace rmtprod {

// Quaternion models use doubled indices nu' = 2 nu, mu' = 2 mu - 1 and the
// weight g(2^{m1} |z|^2).
inline WeightModel doubled_model(const WeightModel& physical) {
    WeightModel w = physical;
    for (auto& v : w.nu) v *= 2.0;
    for (auto& m : w.mu) m = 2.0 * m - 1.0;
    return w;
}

inline double log_beta4_weight(const WeightModel& w, double r) {
    return log_one_point_weight(w, std::ldexp(r * r, static_cast<int>(w.m1)));
}

// log of 2^{-m1} prod(nu' + 2k + 2) / prod(mu' + 2k + 2) = log(c_k / c_{k+1})
inline double log_skew_ratio(const WeightModel& w, std::size_t k) {
    const double K = static_cast<double>(k);
    double s = -static_cast<double>(w.m1) * std::numbers::ln2;
    for (double v : w.nu) s += std::log(v + 2.0 * K + 2.0);
    for (double m : w.mu) s -= std::log(m + 2.0 * K + 2.0);
    return s;
}

inline double log_skew_norm(const WeightModel& w, std::size_t l) {
    const double L = static_cast<double>(l);
    double s = std::log(2.0 * std::numbers::pi) - 2.0 * static_cast<double>(w.m1) * (L + 1.0) * std::numbers::ln2;
    for (double v : w.nu) s += std::lgamma(v + 2.0 * L + 2.0);
    for (double m : w.mu) s -= std::lgamma(m + 2.0 * L + 2.0);
    return s;
}

struct SkewPair {
    std::vector<double> even_coeffs;  // coefficient of z^{2k} in p_{2l}, k = 0..l
    double h = 0.0;                   // <p_{2l+1}|p_{2l}>; p_{2l+1}(z) = z^{2l+1}
};

inline SkewPair skew_pair(const WeightModel& w, std::size_t l) {
    w.validate();
    SkewPair p;
    p.even_coeffs.assign(l + 1, 1.0);
    double lc = 0.0;
    for (std::size_t k = l; k-- > 0;) {
        lc += log_skew_ratio(w, k);
        p.even_coeffs[k] = std::exp(lc);
    }
    p.h = std::exp(log_skew_norm(w, l));
    return p;
}

inline double density_beta4(const WeightModel& w, std::size_t n_min, cplx z) {
    w.validate();
    const double r = std::abs(z);
    if (z.imag() == 0.0 || r == 0.0) return 0.0;
    const double lw = log_beta4_weight(w, r);
    if (!std::isfinite(lw)) return 0.0;
    const double sin_t = z.imag() / r, theta = std::arg(z), lr = std::log(r);
    std::vector<double> lh(n_min), lratio(n_min);
    for (std::size_t l = 0; l < n_min; ++l) {
        lh[l] = log_skew_norm(w, l);
        lratio[l] = log_skew_ratio(w, l);
    }
    std::vector<double> mag;
    std::vector<double> sgn;
    for (std::size_t l = 0; l < n_min; ++l) {
        double lc = 0.0;  // log c_k of p_{2l}, walking k downward from c_l = 1
        for (std::size_t k = l + 1; k-- > 0;) {
            if (k < l) lc += lratio[k];
            mag.push_back(lc - lh[l] + 2.0 * static_cast<double>(l + k + 1) * lr);
            sgn.push_back(std::sin((2.0 * (static_cast<double>(l) - static_cast<double>(k)) + 1.0) * theta));
        }
    }
    double top = -std::numeric_limits<double>::infinity();
    for (double m : mag) top = std::max(top, m);
    double s = 0.0;
    for (std::size_t i = 0; i < mag.size(); ++i) s += sgn[i] * std::exp(mag[i] - top);
    return 4.0 * sin_t * s * std::exp(top + lw);
}

// angular integral of density_beta4 times r
inline double radial_projection_beta4(const WeightModel& w, std::size_t n_min, double r) {
    w.validate();
    if (r <= 0.0) return 0.0;
    const double lw = log_beta4_weight(w, r);
    if (!std::isfinite(lw)) return 0.0;
    std::vector<double> terms(n_min);
    for (std::size_t l = 0; l < n_min; ++l)
        terms[l] = (4.0 * static_cast<double>(l) + 3.0) * std::log(r) - log_skew_norm(w, l);
    return 4.0 * std::numbers::pi * std::exp(lw + special::log_sum_exp(terms));
}

} // namespace rmtprod
