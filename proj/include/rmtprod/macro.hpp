#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "chain.hpp"
#include "dense.hpp"

namespace rmtprod {

// Large-N limit with nu_hat = nu / N_min and mu_hat = mu / N_min held fixed;
// the last m2 entries of nu_hat pair with mu_hat.
struct MacroModel {
    std::vector<double> nu_hat;
    std::vector<double> mu_hat;
    std::size_t m1 = 0;
    std::size_t m2 = 0;

    void validate() const {
        if (nu_hat.size() != m1 + m2 || mu_hat.size() != m2 || nu_hat.empty())
            throw std::invalid_argument("macro model sizes inconsistent");
        for (double v : nu_hat)
            if (!(v >= 0.0)) throw std::invalid_argument("nu_hat must be nonnegative");
        for (std::size_t i = 0; i < m2; ++i)
            if (!(mu_hat[i] > nu_hat[m1 + i])) throw std::invalid_argument("mu_hat must exceed its nu_hat");
    }
};

inline MacroModel macro_model(const DerivedIndices& d) {
    MacroModel m;
    const double n = static_cast<double>(d.n_min);
    for (auto p : d.i1) m.nu_hat.push_back(d.weight_nu[p] / n);
    for (auto p : d.i2) {
        m.nu_hat.push_back(d.weight_nu[p] / n);
        m.mu_hat.push_back(d.mu.at(p) / n);
    }
    m.m1 = d.m1;
    m.m2 = d.m2;
    return m;
}

inline double rational_R(const MacroModel& m, double y) {
    double r = 1.0;
    for (double v : m.nu_hat) r *= v + y;
    for (double u : m.mu_hat) r /= u + y;
    return r;
}

inline double log_rational_R(const MacroModel& m, double y) {
    double r = 0.0;
    for (double v : m.nu_hat) r += std::log(v + y);
    for (double u : m.mu_hat) r -= std::log(u + y);
    return r;
}

// product rule, so vanishing nu_hat + y causes no division
inline double rational_R_prime(const MacroModel& m, double y) {
    double den = 1.0, inv_mu = 0.0;
    for (double u : m.mu_hat) {
        den *= u + y;
        inv_mu += 1.0 / (u + y);
    }
    double num_prime = 0.0;
    for (std::size_t j = 0; j < m.nu_hat.size(); ++j) {
        double p = 1.0;
        for (std::size_t k = 0; k < m.nu_hat.size(); ++k)
            if (k != j) p *= m.nu_hat[k] + y;
        num_prime += p;
    }
    return num_prime / den - rational_R(m, y) * inv_mu;
}

inline std::pair<double, double> annulus_radii(const MacroModel& m) {
    m.validate();
    return {std::sqrt(rational_R(m, 0.0)), std::sqrt(rational_R(m, 1.0))};
}

// y in [0, 1] with R(y) = t, for R(0) <= t <= R(1)
inline double inverse_R(const MacroModel& m, double t) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (rational_R(m, mid) < t ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double macro_density(const MacroModel& m, double r_hat) {
    m.validate();
    const double t = r_hat * r_hat;
    const double r0 = rational_R(m, 0.0), r1 = rational_R(m, 1.0);
    if (t < r0 || t > r1) return 0.0;
    const double y = inverse_R(m, t);
    return 1.0 / (std::numbers::pi * rational_R_prime(m, y));
}

// radial pdf of |z_hat|, 2 pi r rho(r)
inline double macro_radial_density(const MacroModel& m, double r_hat) {
    return 2.0 * std::numbers::pi * r_hat * macro_density(m, r_hat);
}

inline double macro_moment(const MacroModel& m, std::size_t k) {
    m.validate();
    if (k == 0) return 1.0;
    auto f = [&](double y) { return std::pow(rational_R(m, y), static_cast<double>(k)); };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 15, 1e-13);
}

inline cplx green_function(const MacroModel& m, cplx z_hat) {
    m.validate();
    const double t = std::norm(z_hat);
    const double r0 = rational_R(m, 0.0), r1 = rational_R(m, 1.0);
    constexpr double slack = 1e-13;
    if (z_hat == cplx(0.0) || t < r0 * (1.0 - slack) || t > r1 * (1.0 + slack))
        throw std::domain_error("Green function argument outside the support annulus");
    return inverse_R(m, std::clamp(t, r0, r1)) / z_hat;
}

// <ln|z|> for the unscaled product: (1/2) int_0^1 ln R + (m1/2) ln N_min.
inline double lyapunov_macro(const MacroModel& m, std::size_t n_min, std::size_t m1) {
    m.validate();
    // two-argument form keeps the log singularity at y = 0 off the abscissae
    auto f = [&](double y, double yc) { return log_rational_R(m, yc < 0.0 ? -yc : y); };
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0;
    const double I = ts.integrate(f, 0.0, 1.0, 1e-14, &err);
    return 0.5 * I + 0.5 * static_cast<double>(m1) * std::log(static_cast<double>(n_min));
}

} // namespace rmtprod
