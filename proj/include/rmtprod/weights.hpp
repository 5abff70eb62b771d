#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "chain.hpp"
#include "special.hpp"

namespace rmtprod {

struct quadrature_failure : std::runtime_error {
    double error_estimate;
    quadrature_failure(const std::string& what, double err)
        : std::runtime_error(what + " (error estimate " + std::to_string(err) + ")"), error_estimate(err) {}
};

// Parameters of g(x) = G^{M,0}_{m2,M}(-; mu | nu | x). The first m1 entries of
// nu belong to Ginibre factors; the last m2 pair with mu in order.
struct WeightModel {
    std::vector<double> nu;
    std::vector<double> mu;
    std::size_t m1 = 0;
    std::size_t m2 = 0;

    void validate() const {
        if (nu.size() != m1 + m2 || mu.size() != m2)
            throw std::invalid_argument("weight model sizes inconsistent");
        if (nu.empty()) throw std::invalid_argument("weight model has no factors");
        for (double v : nu)
            if (!(v >= 0.0)) throw std::invalid_argument("nu must be nonnegative");
        for (std::size_t i = 0; i < m2; ++i)
            if (!(mu[i] > nu[m1 + i])) throw std::invalid_argument("mu must exceed its nu");
    }
    double min_nu() const { return *std::min_element(nu.begin(), nu.end()); }
};

inline WeightModel weight_model(const DerivedIndices& d) {
    WeightModel w;
    for (auto p : d.i1) w.nu.push_back(d.weight_nu[p]);
    for (auto p : d.i2) {
        w.nu.push_back(d.weight_nu[p]);
        w.mu.push_back(d.mu.at(p));
    }
    w.m1 = d.m1;
    w.m2 = d.m2;
    return w;
}

enum class WeightMethod { automatic, contour, convolution };

namespace detail {

// sum log Gamma(nu - u) - sum log Gamma(mu - u)
inline special::cplx mellin_log(const WeightModel& w, special::cplx u) {
    special::cplx s = 0.0;
    for (double v : w.nu) s += special::lgamma(v - u);
    for (double m : w.mu) s -= special::lgamma(m - u);
    return s;
}

inline double mellin_log_real(const WeightModel& w, double c) {
    double s = 0.0;
    for (double v : w.nu) s += std::lgamma(v - c);
    for (double m : w.mu) s -= std::lgamma(m - c);
    return s;
}

// Real saddle of c ln x + mellin_log(c) left of all poles.
inline double contour_abscissa(const WeightModel& w, double lx) {
    using boost::math::digamma;
    // for small x, x^c cancels unless c hugs the leftmost pole; 1/|ln x| keeps x^(nu - c) near 1/e
    const double gap = lx < -4.0 ? 1.0 / std::abs(lx) : 0.25;
    const double top = w.min_nu() - gap;
    auto dphi = [&](double c) {
        double s = lx;
        for (double v : w.nu) s -= digamma(v - c);
        for (double m : w.mu) s += digamma(m - c);
        return s;
    };
    if (dphi(top) <= 0.0) return top;
    double lo = top - 1.0;
    while (dphi(lo) > 0.0) {
        lo = top - 2.0 * (top - lo);
        if (lo < -1e8) return top;
    }
    boost::uintmax_t it = 200;
    auto r = boost::math::tools::bisect(dphi, lo, top, boost::math::tools::eps_tolerance<double>(40), it);
    return 0.5 * (r.first + r.second);
}

inline double log_weight_contour(const WeightModel& w, double x) {
    if (w.m1 == 0) throw std::invalid_argument("contour evaluation needs at least one Ginibre factor");
    const double lx = std::log(x);
    const double c = contour_abscissa(w, lx);
    const double l0 = mellin_log_real(w, c);
    auto integrand = [&](double t) {
        const special::cplx e = special::cplx(0.0, t * lx) + mellin_log(w, special::cplx(c, t)) - l0;
        return std::exp(e.real()) * std::cos(e.imag());
    };
    // integrand modulus decays like exp(-m1 pi t / 2)
    double T = 1.0;
    while ((mellin_log(w, special::cplx(c, T)) - l0).real() > std::log(1e-17)) T *= 1.5;
    double err = 0.0;
    const double I =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, T, 15, 1e-12, &err);
    const double lg = c * lx + l0 + std::log(I / std::numbers::pi);
    // far in the tail exp(lg) underflows anyway; only the log needs a few digits
    const double tol = lg < -1000.0 ? 1e-6 : 1e-9;
    if (!(I > 0.0) || err > tol * std::abs(I))
        throw quadrature_failure("Mellin-Barnes integral did not converge", err);
    return lg;
}

// log K_v(z) from the large-argument series, for z where K itself underflows
inline double log_bessel_k_large(double v, double z) {
    const double m = 4.0 * v * v;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 30; ++k) {
        term *= (m - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * z);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return 0.5 * std::log(std::numbers::pi / (2.0 * z)) - z + std::log(sum);
}

struct Factor {
    bool beta = false;
    double nu = 0.0, mu = 0.0;
};

// one_minus_y is passed separately to keep precision near y = 1
inline double factor_log_density(const Factor& f, double y, double one_minus_y) {
    if (!f.beta) return f.nu * std::log(y) - y;
    if (!(one_minus_y > 0.0)) return -std::numeric_limits<double>::infinity();
    return f.nu * std::log(y) + (f.mu - f.nu - 1.0) * std::log(one_minus_y) - std::lgamma(f.mu - f.nu);
}

inline double factor_log_density(const Factor& f, double y) { return factor_log_density(f, y, 1.0 - y); }

// One integrator per recursion depth; construction precomputes abscissae.
inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_at(std::size_t depth) {
    static thread_local std::vector<std::unique_ptr<boost::math::quadrature::tanh_sinh<double>>> pool;
    while (pool.size() <= depth) pool.push_back(std::make_unique<boost::math::quadrature::tanh_sinh<double>>());
    return *pool[depth];
}

// x_complement = 1 - x, carried separately so a Beta leaf keeps precision near 1
inline double convolve(const std::vector<Factor>& fs, std::size_t from, double x, double x_complement) {
    if (x <= 0.0) throw std::invalid_argument("convolution needs x > 0");
    const std::size_t left = fs.size() - from;
    if (left == 1) return std::exp(factor_log_density(fs[from], x, x_complement));
    bool rest_beta = true;
    for (std::size_t k = from + 1; k < fs.size(); ++k) rest_beta = rest_beta && fs[k].beta;
    if (rest_beta && x >= 1.0) return 0.0;
    const Factor& f = fs[from];
    // inner_complement = 1 - x / y
    auto integrand = [&](double y, double one_minus_y, double inner_complement) {
        if (y <= 0.0 || !std::isfinite(x / y)) return 0.0;
        const double r = convolve(fs, from + 1, x / y, inner_complement);
        if (r == 0.0) return 0.0;
        return std::exp(factor_log_density(f, y, one_minus_y)) * r / y;
    };
    double err = 0.0;
    double v;
    // two-argument form: xc is the signed distance to the nearer endpoint
    if (f.beta && rest_beta && x < 0.5) {
        auto g = [&](double, double xc) {
            if (xc > 0.0) {
                const double yy = 1.0 - xc;
                return integrand(yy, xc, (x_complement - xc) / yy);
            }
            const double yy = x - xc;
            return integrand(yy, x_complement + xc, -xc / yy);
        };
        v = tanh_sinh_at(from).integrate(g, x, 1.0, 1e-13, &err);
    } else if (f.beta && rest_beta) {
        // y = 1 - d u on u in [0, 1], d = 1 - x, keeps precision when x is close to 1
        const double d = x_complement;
        auto g = [&](double, double uc) {
            const double uu = uc > 0.0 ? 1.0 - uc : -uc;
            const double one_minus_u = uc > 0.0 ? uc : 1.0 + uc;
            const double yy = 1.0 - d * uu;
            return d * integrand(yy, d * uu, d * one_minus_u / yy);
        };
        v = tanh_sinh_at(from).integrate(g, 0.0, 1.0, 1e-13, &err);
    } else if (f.beta) {
        auto g = [&](double, double xc) {
            const double yy = xc > 0.0 ? 1.0 - xc : -xc;
            return integrand(yy, xc > 0.0 ? xc : 1.0 - yy, 1.0 - x / yy);
        };
        v = tanh_sinh_at(from).integrate(g, 0.0, 1.0, 1e-13, &err);
    } else {
        auto mapped = [&](double t, double xc) {  // y = t / (1 - t)
            const double tc = xc > 0.0 ? xc : 1.0 - t;
            const double tt = xc > 0.0 ? 1.0 - xc : -xc;
            // exp(-y) has long underflowed once tc * tc does
            if (tt <= 0.0 || !(tc * tc > 0.0)) return 0.0;
            const double y = tt / tc;
            return integrand(y, 1.0 - y, 1.0 - x / y) / (tc * tc);
        };
        v = tanh_sinh_at(from).integrate(mapped, 0.0, 1.0, 1e-13, &err);
    }
    if (!std::isfinite(v) || err > 1e-8 * std::abs(v) + 1e-300)
        throw quadrature_failure("Mellin convolution did not converge", err);
    return v;
}

inline double log_weight_convolution(const WeightModel& w, double x) {
    std::vector<Factor> fs;
    // Beta factors first so inner levels see the unbounded Gamma support last.
    for (std::size_t i = 0; i < w.m2; ++i) fs.push_back({true, w.nu[w.m1 + i], w.mu[i]});
    for (std::size_t i = 0; i < w.m1; ++i) fs.push_back({false, w.nu[i], 0.0});
    const double v = convolve(fs, 0, x, 1.0 - x);
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

inline double log_weight_at_zero(const WeightModel& w) {
    const double nmin = w.min_nu();
    if (nmin > 0.0) return -std::numeric_limits<double>::infinity();
    const auto zeros = std::count(w.nu.begin(), w.nu.end(), 0.0);
    if (zeros > 1) return std::numeric_limits<double>::infinity();
    // residue at u = 0
    double s = 0.0;
    for (double v : w.nu)
        if (v != 0.0) s += std::lgamma(v);
    for (double m : w.mu) s -= std::lgamma(m);
    return s;
}

} // namespace detail

inline double log_one_point_weight(const WeightModel& w, double x,
                                   WeightMethod method = WeightMethod::automatic) {
    w.validate();
    if (!(x >= 0.0)) throw std::invalid_argument("weight argument must be nonnegative");
    const double ninf = -std::numeric_limits<double>::infinity();
    if (w.m1 == 0 && x >= 1.0) {
        if (x > 1.0 || w.m2 > 1) return ninf;
    }
    if (x == 0.0) return detail::log_weight_at_zero(w);
    if (method == WeightMethod::automatic) {
        if (w.m1 == 1 && w.m2 == 0) return w.nu[0] * std::log(x) - x;
        if (w.m1 == 0 && w.m2 == 1) {
            const double a = w.mu[0] - w.nu[0] - 1.0;
            if (x == 1.0) return a == 0.0 ? -std::lgamma(w.mu[0] - w.nu[0]) : (a > 0 ? ninf : -ninf);
            return w.nu[0] * std::log(x) + a * std::log1p(-x) - std::lgamma(w.mu[0] - w.nu[0]);
        }
        if (w.m1 == 2 && w.m2 == 0) {
            const double k = boost::math::cyl_bessel_k(std::abs(w.nu[0] - w.nu[1]), 2.0 * std::sqrt(x));
            const double lk = k > 1e-290 && std::isfinite(k)
                                  ? std::log(k)
                                  : detail::log_bessel_k_large(std::abs(w.nu[0] - w.nu[1]), 2.0 * std::sqrt(x));
            return std::log(2.0) + 0.5 * (w.nu[0] + w.nu[1]) * std::log(x) + lk;
        }
        if (w.m1 == 0) return detail::log_weight_convolution(w, x);
        try {
            return detail::log_weight_contour(w, x);
        } catch (const quadrature_failure&) {
            // small x leaves the contour with heavy cancellation
            return detail::log_weight_convolution(w, x);
        }
    }
    if (method == WeightMethod::contour) return detail::log_weight_contour(w, x);
    if (x == 1.0 && w.m1 == 0) return ninf;
    return detail::log_weight_convolution(w, x);
}

inline double one_point_weight(const WeightModel& w, double x, WeightMethod method = WeightMethod::automatic) {
    return std::exp(log_one_point_weight(w, x, method));
}

// integral of |z|^{2a} g(|z|^2) over the plane
inline double weight_norm_moment(const WeightModel& w, double a) {
    w.validate();
    double s = 0.0;
    for (double v : w.nu) {
        if (v + a + 1.0 <= 0.0) throw std::domain_error("moment order hits a Gamma pole");
        s += std::lgamma(v + a + 1.0);
    }
    for (double m : w.mu) s -= std::lgamma(m + a + 1.0);
    return std::numbers::pi * std::exp(s);
}

} // namespace rmtprod
