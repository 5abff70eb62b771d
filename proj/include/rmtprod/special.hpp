#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

namespace rmtprod::special {

using cplx = std::complex<double>;

// log sin(pi z), stable for large |Im z|; branch is irrelevant for callers,
// which only exponentiate sums of these.
inline cplx log_sin_pi(cplx z) {
    const double pi = std::numbers::pi;
    if (z.imag() < 0) return std::conj(log_sin_pi(std::conj(z)));
    const cplx i(0.0, 1.0);
    const cplx e = std::exp(2.0 * i * pi * z);  // |e| <= 1 for Im z >= 0
    return -i * pi * z + std::log((e - 1.0) / (2.0 * i));
}

// Principal-branch complex log-gamma: upward shift to |z| >= 15 plus Stirling series.
inline cplx lgamma(cplx z) {
    const double pi = std::numbers::pi;
    if (z.real() < 0.5) return std::log(pi) - log_sin_pi(z) - lgamma(1.0 - z);
    cplx shift = 0.0;
    while (std::abs(z) < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    static constexpr double b[] = {1.0 / 12.0,        -1.0 / 360.0,       1.0 / 1260.0,
                                   -1.0 / 1680.0,     1.0 / 1188.0,       -691.0 / 360360.0,
                                   1.0 / 156.0,       -3617.0 / 122400.0};
    const cplx zi = 1.0 / z, zi2 = zi * zi;
    cplx series = 0.0, p = zi;
    for (double c : b) {
        series += c * p;
        p *= zi2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * pi) + series - shift;
}

inline double log_sum_exp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

} // namespace rmtprod::special
