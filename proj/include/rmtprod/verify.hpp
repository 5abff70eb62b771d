#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <stdexcept>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "chain.hpp"
#include "macro.hpp"
#include "montecarlo.hpp"
#include "spectra.hpp"
#include "weights.hpp"

namespace rmtprod {

// Property suites behind `rmtprod verify`; each check compares value against threshold.
struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool below = true;  // pass iff value < threshold (otherwise value > threshold)
    bool passed() const { return below ? value < threshold : value > threshold; }
};

struct SuiteResult {
    std::string name;
    std::vector<Check> checks;
    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed()) return false;
        return true;
    }
};

namespace detail {

inline SpectraDataset run_seeded(const ChainSpec& spec, std::size_t reps, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.spec = spec;
    cfg.n_realizations = reps;
    cfg.master_seed = seed;
    return run_experiment(cfg);
}

// largest distance in a greedy nearest matching of two equal-size multisets
inline double matching_distance(std::vector<cplx> a, std::vector<cplx> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::sort(a.begin(), a.end(), [](cplx x, cplx y) { return std::abs(x) > std::abs(y); });
    double worst = 0.0;
    for (const cplx& z : a) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < b.size(); ++k)
            if (std::abs(z - b[k]) < std::abs(z - b[best])) best = k;
        worst = std::max(worst, std::abs(z - b[best]));
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return worst;
}

inline double max_modulus(const std::vector<cplx>& z) {
    double m = 0.0;
    for (const cplx& v : z) m = std::max(m, std::abs(v));
    return m;
}

} // namespace detail

inline SuiteResult suite_commute(std::uint64_t seed) {
    SuiteResult r{"commute", {}};
    const auto a = FactorSpec::induced(FactorSpec::ginibre(30, 30));
    const auto b = FactorSpec::induced(FactorSpec::ginibre(33, 30));
    const ChainSpec ab{complex_class, {a, b}}, ba{complex_class, {b, a}};
    const double p = *ks_two_sample(detail::run_seeded(ab, 300, seed).moduli(),
                                    detail::run_seeded(ba, 300, seed + 1).moduli())
                          .p_value;
    r.checks.push_back({"weak commutation (0,3) vs (3,0), KS p", p, 0.01, false});
    const ChainSpec left{complex_class,
                         {FactorSpec::induced(FactorSpec::ginibre(8, 4)), FactorSpec::jacobi(4, 4, 8)}};
    const ChainSpec right{complex_class, {FactorSpec::jacobi(4, 4, 6, BathCheck::subblock),
                                          FactorSpec::induced(FactorSpec::ginibre(4, 6))}};
    const double q = *ks_two_sample(detail::run_seeded(left, 500, seed + 2).moduli(),
                                    detail::run_seeded(right, 500, seed + 3).moduli())
                          .p_value;
    r.checks.push_back({"left vs right reduction pipeline (8x6 base), KS p", q, 0.01, false});
    return r;
}

inline SuiteResult suite_reduction(std::uint64_t seed) {
    SuiteResult r{"reduction", {}};
    SeededStream s(seed);
    double resid = 0.0, sv = 0.0, ring = 0.0;
    for (int k = 0; k < 40; ++k) {
        const int beta = k % 3 == 0 ? 1 : (k % 3 == 1 ? 2 : 4);
        const std::size_t M = 1 + s.engine()() % 4;
        std::vector<std::size_t> n(M + 1);
        for (auto& d : n) d = 1 + s.engine()() % 12;
        n[M] = n[0];
        ChainSpec spec{DysonClass(beta), {}};
        for (std::size_t j = 0; j < M; ++j) spec.factors.push_back(FactorSpec::ginibre(n[j + 1], n[j]));
        const ProductRealization pr = sample_chain(spec, s);
        const ReducedChain red = reduce_to_square(pr);
        const double norm = pr.product.entries.norm();
        resid = std::max(resid, (red.reconstruct().entries - pr.product.entries).norm() / norm);
        const std::vector<double> a = singular_values(pr.product), b = singular_values(red.square_product());
        for (std::size_t i = 0; i < b.size(); ++i) sv = std::max(sv, std::abs(a[i] - b[i]) / a.front());
    }
    for (int k = 0; k < 30; ++k) {
        const int beta = k % 3 == 0 ? 1 : (k % 3 == 1 ? 2 : 4);
        const std::size_t M = 1 + s.engine()() % 4, n = 1 + s.engine()() % 6;
        ChainSpec spec{DysonClass(beta), {}};
        for (std::size_t j = 0; j < M; ++j) spec.factors.push_back(FactorSpec::ginibre(n, n));
        const ProductRealization pr = sample_chain(spec, s);
        std::vector<cplx> bm, lx;
        for (const cplx& z : stored_eigenvalues(assemble_ring_operator(pr).entries, beta == 1))
            bm.push_back(std::pow(z, static_cast<double>(M)));
        const std::vector<cplx> ex = stored_eigenvalues(pr.product.entries, beta == 1);
        for (std::size_t j = 0; j < M; ++j) lx.insert(lx.end(), ex.begin(), ex.end());
        const double scale = std::max(detail::max_modulus(ex), std::numeric_limits<double>::min());
        ring = std::max(ring, detail::matching_distance(bm, lx) / scale);
    }
    r.checks.push_back({"reconstruction residual", resid, 1e-10, true});
    r.checks.push_back({"singular values of reduced product", sv, 1e-9, true});
    r.checks.push_back({"ring operator eigenvalues", ring, 1e-8, true});
    const ChainSpec rect{complex_class, {FactorSpec::ginibre(5, 8), FactorSpec::ginibre(8, 5)}};
    double wrong = 0.0;
    for (int k = 0; k < 100; ++k) {
        const ProductRealization pr = sample_chain(rect, s);
        wrong += spectrum(pr.product).zero_modes != 3;
    }
    r.checks.push_back({"realizations of 8->5->8 without exactly 3 zero modes", wrong, 0.5, true});
    return r;
}

inline SuiteResult suite_appendix_a(std::uint64_t seed) {
    SuiteResult r{"appendixA", {}};
    SeededStream s(seed);
    double eig = 0.0, violations = 0.0;
    for (int k = 0; k < 100000; ++k) {
        Eigen::Matrix2d z;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) z(i, j) = s.normal();
        const TwoByTwoData d = decompose_2x2(z);
        const auto [zp, zm] = eig_from_singular_2x2(d);
        Eigen::EigenSolver<Eigen::Matrix2d> es(z, false);
        const std::vector<cplx> direct = {es.eigenvalues()(0), es.eigenvalues()(1)};
        const double scale = detail::max_modulus(direct);
        eig = std::max(eig, detail::matching_distance(direct, {zp, zm}) / scale);
        const double tr = z.trace(), det = z.determinant();
        if (tr * tr - 4.0 * det < 0.0 && (!(det > 0.0) || d.s != 1)) violations += 1.0;
    }
    r.checks.push_back({"eigenvalues from singular-value data", eig, 1e-10, true});
    r.checks.push_back({"complex pairs without det > 0 and s = +1", violations, 0.5, true});
    return r;
}

inline SuiteResult suite_weights() {
    SuiteResult r{"weights", {}};
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    double g = 0.0, k = 0.0, b = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double x = 1e-4 * std::pow(1e6, i / 40.0);
        g = std::max(g, rel(one_point_weight({{0.5}, {}, 1, 0}, x, WeightMethod::contour), std::sqrt(x) * std::exp(-x)));
        const double kref = 2.0 * std::sqrt(x) * boost::math::cyl_bessel_k(1.0, 2.0 * std::sqrt(x));
        k = std::max(k, rel(one_point_weight({{1.0, 0.0}, {}, 2, 0}, x, WeightMethod::contour), kref));
        const double y = 1e-6 * std::pow(0.99e6, i / 40.0);
        const double bref = std::sqrt(y) * std::pow(1.0 - y, 1.7) / std::tgamma(2.7);
        b = std::max(b, rel(one_point_weight({{0.5, 1.7}, {1.7, 3.2}, 0, 2}, y), bref));
    }
    r.checks.push_back({"Gaussian closed form via contour", g, 1e-8, true});
    r.checks.push_back({"Bessel closed form via contour", k, 1e-6, true});
    r.checks.push_back({"Beta closed form via convolution", b, 1e-8, true});
    return r;
}

inline SuiteResult suite_lyapunov(std::uint64_t seed) {
    SuiteResult r{"lyapunov", {}};
    const std::size_t n = 100;
    const ChainSpec spec{complex_class, {FactorSpec::ginibre(n, n), FactorSpec::ginibre(n, n)}};
    const DerivedIndices idx = derive_indices(spec);
    const LyapunovEstimate e = lyapunov_estimate(detail::run_seeded(spec, 40, seed).spectra());
    const double macro = lyapunov_macro(macro_model(idx), n, idx.m1);
    r.checks.push_back({"relative gap MC vs macroscopic value, N=100, M1=2", std::abs(e.mean - macro) / std::abs(macro),
                        0.02, true});
    return r;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"commute", "reduction", "appendixA", "weights", "lyapunov"};
    return names;
}

// throws std::invalid_argument for an unknown suite name
inline SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "commute") return suite_commute(seed);
    if (name == "reduction") return suite_reduction(seed);
    if (name == "appendixA") return suite_appendix_a(seed);
    if (name == "weights") return suite_weights();
    if (name == "lyapunov") return suite_lyapunov(seed);
    throw std::invalid_argument("unknown suite " + name);
}

} // namespace rmtprod
