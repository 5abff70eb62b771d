#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chain.hpp"
#include "spectra.hpp"

namespace rmtprod {

enum class Scaling { raw, macro };

struct ExperimentConfig {
    ChainSpec spec;
    std::size_t n_realizations = 1;
    std::uint64_t master_seed = 0;
    bool collect_eigenvalues = true;
    bool collect_singular_values = false;
    Scaling scaling = Scaling::raw;
    unsigned threads = 0;  // 0: RMT_THREADS or hardware concurrency
};

struct RealizationResult {
    std::size_t index = 0;
    std::vector<cplx> eigenvalues;   // nonzero part, scaled
    std::size_t zero_modes = 0;
    std::vector<double> singular_values;
};

struct SpectraDataset {
    std::vector<RealizationResult> realizations;
    DysonClass dyson;
    double scale = 1.0;  // factor applied to raw eigenvalues and singular values

    std::size_t eigenvalue_count() const {
        std::size_t n = 0;
        for (const auto& r : realizations) n += r.eigenvalues.size();
        return n;
    }
    std::vector<double> moduli() const {
        std::vector<double> m;
        m.reserve(eigenvalue_count());
        for (const auto& r : realizations)
            for (const auto& z : r.eigenvalues) m.push_back(std::abs(z));
        return m;
    }
    std::vector<SpectrumSample> spectra() const {
        std::vector<SpectrumSample> out;
        for (const auto& r : realizations) {
            SpectrumSample s;
            s.dyson = dyson;
            s.eigenvalues = r.eigenvalues;
            s.singular_values = r.singular_values;
            out.push_back(std::move(s));
        }
        return out;
    }
};

struct experiment_failure : std::runtime_error {
    std::size_t index;
    experiment_failure(std::size_t i, const std::string& what)
        : std::runtime_error("realization " + std::to_string(i) + ": " + what), index(i) {}
};

inline unsigned worker_count(unsigned requested) {
    if (requested > 0) return requested;
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RMT_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

inline double macro_scale(const ChainSpec& spec) {
    const DerivedIndices d = derive_indices(spec);
    return std::pow(static_cast<double>(d.n_min), -0.5 * static_cast<double>(d.m1));
}

// Realization i draws from SeededStream(master_seed, i); output is in index
// order whatever the number of workers.
inline SpectraDataset run_experiment(const ExperimentConfig& cfg) {
    if (cfg.n_realizations == 0) throw std::invalid_argument("n_realizations must be positive");
    validate(cfg.spec);
    if (cfg.collect_eigenvalues && !cfg.spec.closed())
        throw std::invalid_argument("eigenvalues need a closed chain (N_0 = N_M)");
    SpectraDataset ds;
    ds.dyson = cfg.spec.dyson;
    ds.scale = cfg.scaling == Scaling::macro ? macro_scale(cfg.spec) : 1.0;
    ds.realizations.resize(cfg.n_realizations);

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::optional<experiment_failure> failure;
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cfg.n_realizations;) {
            try {
                SeededStream s(cfg.master_seed, i);
                const ProductRealization r = sample_chain(cfg.spec, s);
                RealizationResult& out = ds.realizations[i];
                out.index = i;
                if (cfg.collect_eigenvalues) {
                    const SpectrumSample sp = eigenvalues(r.product);
                    out.zero_modes = sp.zero_modes;
                    for (const cplx& z : sp.nonzero()) out.eigenvalues.push_back(z * ds.scale);
                }
                if (cfg.collect_singular_values)
                    for (double v : singular_values(r.product)) out.singular_values.push_back(v * ds.scale);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!failure || failure->index > i) failure.emplace(i, e.what());
            }
        }
    };
    const unsigned nt = std::min<unsigned>(worker_count(cfg.threads), static_cast<unsigned>(cfg.n_realizations));
    if (nt <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) throw *failure;
    return ds;
}

enum class Normalization { counts, pdf };

struct Histogram {
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    std::size_t total = 0;
    std::size_t outside = 0;  // samples beyond the edges, not part of total
    Normalization normalization = Normalization::counts;

    std::size_t bins() const { return counts.size(); }
    double width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
    double center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
    double pdf(std::size_t i) const {
        return static_cast<double>(counts[i]) / (static_cast<double>(total) * width(i));
    }
    // count per unit area of the annulus between the edges, per sample
    double areal_density(std::size_t i) const {
        const double a = bin_edges[i], b = bin_edges[i + 1];
        return static_cast<double>(counts[i]) / (static_cast<double>(total) * std::numbers::pi * (b * b - a * a));
    }
    double value(std::size_t i) const {
        return normalization == Normalization::pdf ? pdf(i) : static_cast<double>(counts[i]);
    }
};

inline Histogram histogram(const std::vector<double>& data, std::vector<double> edges,
                           Normalization norm = Normalization::pdf) {
    if (edges.size() < 2) throw std::invalid_argument("histogram needs at least one bin");
    if (!std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw std::invalid_argument("bin edges must be strictly increasing");
    Histogram h;
    h.bin_edges = std::move(edges);
    h.counts.assign(h.bin_edges.size() - 1, 0);
    h.normalization = norm;
    for (double v : data) {
        if (v < h.bin_edges.front() || v > h.bin_edges.back()) {
            ++h.outside;
            continue;
        }
        auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), v);
        std::size_t k = static_cast<std::size_t>(it - h.bin_edges.begin());
        k = k == 0 ? 0 : std::min(k - 1, h.counts.size() - 1);
        ++h.counts[k];
        ++h.total;
    }
    return h;
}

inline std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
    if (bins == 0 || !(hi > lo)) throw std::invalid_argument("degenerate binning");
    std::vector<double> e(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) e[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
    e.back() = hi;
    return e;
}

inline Histogram histogram_radial(const SpectraDataset& ds, std::size_t bins,
                                  std::optional<std::pair<double, double>> range = std::nullopt) {
    const std::vector<double> m = ds.moduli();
    if (m.empty()) throw std::invalid_argument("dataset has no eigenvalues");
    double lo = 0.0, hi;
    if (range) {
        lo = range->first;
        hi = range->second;
    } else {
        hi = *std::max_element(m.begin(), m.end());
        if (hi == 0.0) hi = 1.0;
    }
    return histogram(m, uniform_edges(lo, hi, bins), Normalization::pdf);
}

enum class StatisticKind { ks, sup_norm, chi2 };

struct GofReport {
    StatisticKind statistic_kind = StatisticKind::sup_norm;
    double value = 0.0;
    std::optional<double> p_value;
    std::size_t n_effective = 0;
};

enum class DensityMode { radial_pdf, areal };

struct DensityComparison {
    GofReport sup_norm;
    GofReport chi2;
    std::vector<double> empirical;
    std::vector<double> analytic;    // bin averages in the chosen mode
    std::vector<double> deviation;   // |empirical - analytic| per bin
};

// radial_pdf: `analytic` is a pdf of |z|. areal: `analytic` is a planar
// density rho(|z|), compared with counts per annulus area.
inline DensityComparison compare_density(const Histogram& h, const std::function<double(double)>& analytic,
                                         DensityMode mode = DensityMode::radial_pdf) {
    if (h.bins() == 0 || h.total == 0) throw std::invalid_argument("degenerate histogram");
    DensityComparison c;
    std::vector<double> expected;
    for (std::size_t i = 0; i < h.bins(); ++i) {
        const double a = h.bin_edges[i], b = h.bin_edges[i + 1];
        double mass;
        if (mode == DensityMode::radial_pdf) {
            mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(analytic, a, b, 10, 1e-10);
            c.analytic.push_back(mass / (b - a));
            c.empirical.push_back(h.pdf(i));
        } else {
            auto f = [&](double r) { return 2.0 * std::numbers::pi * r * analytic(r); };
            mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-10);
            c.analytic.push_back(mass / (std::numbers::pi * (b * b - a * a)));
            c.empirical.push_back(h.areal_density(i));
        }
        expected.push_back(mass * static_cast<double>(h.total));
        c.deviation.push_back(std::abs(c.empirical.back() - c.analytic.back()));
    }
    c.sup_norm.statistic_kind = StatisticKind::sup_norm;
    c.sup_norm.value = *std::max_element(c.deviation.begin(), c.deviation.end());
    c.sup_norm.n_effective = h.total;

    // merge adjacent bins until each expected count reaches 5; a short tail joins the last group
    std::vector<std::pair<double, double>> groups;  // (expected, observed)
    double eo = 0.0, oo = 0.0;
    for (std::size_t i = 0; i < h.bins(); ++i) {
        eo += expected[i];
        oo += static_cast<double>(h.counts[i]);
        if (eo >= 5.0) {
            groups.emplace_back(eo, oo);
            eo = oo = 0.0;
        }
    }
    if (eo > 0.0 || oo > 0.0) {
        if (groups.empty()) groups.emplace_back(eo, oo);
        else {
            groups.back().first += eo;
            groups.back().second += oo;
        }
    }
    double chi = 0.0;
    for (const auto& [e, o] : groups)
        if (e > 0.0) chi += (o - e) * (o - e) / e;
    c.chi2.statistic_kind = StatisticKind::chi2;
    c.chi2.value = chi;
    c.chi2.n_effective = groups.size();
    if (groups.size() > 1) {
        boost::math::chi_squared dist(static_cast<double>(groups.size() - 1));
        c.chi2.p_value = boost::math::cdf(boost::math::complement(dist, chi));
    }
    return c;
}

// Asymptotic Kolmogorov tail probability Q(lambda).
inline double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double t = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        s += t;
        if (std::abs(t) < 1e-17) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

inline GofReport ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    GofReport r;
    r.statistic_kind = StatisticKind::ks;
    r.value = d;
    const double ne = na * nb / (na + nb);
    r.n_effective = static_cast<std::size_t>(ne);
    const double sq = std::sqrt(ne);
    r.p_value = d == 0.0 ? 1.0 : kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
    return r;
}

inline GofReport ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
    if (a.empty()) throw std::invalid_argument("KS test needs a nonempty sample");
    std::sort(a.begin(), a.end());
    const double n = static_cast<double>(a.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double f = cdf(a[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    GofReport r;
    r.statistic_kind = StatisticKind::ks;
    r.value = d;
    r.n_effective = a.size();
    const double sq = std::sqrt(n);
    r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
    return r;
}

inline void write_eigenvalues_csv(std::ostream& os, const SpectraDataset& ds) {
    os.precision(17);
    os << "realization_index,re,im\n";
    for (const auto& r : ds.realizations)
        for (const auto& z : r.eigenvalues) os << r.index << ',' << z.real() << ',' << z.imag() << '\n';
}

inline void write_singular_values_csv(std::ostream& os, const SpectraDataset& ds) {
    os.precision(17);
    os << "realization_index,sigma\n";
    for (const auto& r : ds.realizations)
        for (double s : r.singular_values) os << r.index << ',' << s << '\n';
}

inline void write_histogram_csv(std::ostream& os, const Histogram& h) {
    os.precision(17);
    os << "bin_left,bin_right,count,pdf\n";
    for (std::size_t i = 0; i < h.bins(); ++i)
        os << h.bin_edges[i] << ',' << h.bin_edges[i + 1] << ',' << h.counts[i] << ',' << h.pdf(i) << '\n';
}

} // namespace rmtprod
