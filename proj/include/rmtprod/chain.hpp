#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dense.hpp"
#include "ensembles.hpp"

namespace rmtprod {

// factors[j] maps N_j -> N_{j+1} (0-based); the product is factors.back() ... factors.front().
struct ChainSpec {
    DysonClass dyson;
    std::vector<FactorSpec> factors;

    std::size_t size() const { return factors.size(); }
    // N_0 ... N_M
    std::vector<std::size_t> dims() const {
        std::vector<std::size_t> n;
        if (factors.empty()) return n;
        n.push_back(factors.front().n_in);
        for (const auto& f : factors) n.push_back(f.n_out);
        return n;
    }
    bool closed() const { return !factors.empty() && factors.front().n_in == factors.back().n_out; }
};

inline void validate(const ChainSpec& spec) {
    if (spec.factors.empty()) throw std::invalid_argument("chain needs at least one factor");
    for (std::size_t j = 1; j < spec.factors.size(); ++j)
        if (spec.factors[j].n_in != spec.factors[j - 1].n_out)
            throw std::invalid_argument("factor " + std::to_string(j) + " input dimension " +
                                        std::to_string(spec.factors[j].n_in) + " does not match " +
                                        std::to_string(spec.factors[j - 1].n_out));
    for (const auto& f : spec.factors) {
        if (f.kind == FactorKind::induced) {
            if (f.base_kind == FactorKind::induced) throw std::invalid_argument("nested induced factor");
            if (f.n_out != f.n_in || f.n_out != std::min(f.base_out, f.base_in))
                throw std::invalid_argument("induced factor must be square of size min(base dims)");
        }
        const FactorSpec b = f.base();
        if (b.kind == FactorKind::jacobi) check_bath(b.bath_dim, b.n_out, b.n_in, b.bath_check);
    }
}

// Factor indices below are 0-based positions in ChainSpec::factors; the
// physical label is position + 1.
struct DerivedIndices {
    std::size_t n_min = 0;
    std::size_t pivot = 0;                 // smallest J with N_J = N_min
    std::vector<std::size_t> nu;           // N_j - N_min, j = 1..M
    std::vector<double> weight_nu;         // exponent of each square-reduced factor
    std::map<std::size_t, Rational> kappa; // Jacobi factors (own or induced base)
    std::map<std::size_t, double> mu;      // kappa + weight_nu + N_min
    std::vector<std::size_t> i1, i2;
    std::size_t m1 = 0, m2 = 0;
};

inline DerivedIndices derive_indices(const ChainSpec& spec) {
    validate(spec);
    const auto n = spec.dims();
    DerivedIndices d;
    d.n_min = *std::min_element(n.begin(), n.end());
    d.pivot = static_cast<std::size_t>(std::find(n.begin(), n.end(), d.n_min) - n.begin());
    const std::size_t M = spec.size();
    for (std::size_t j = 1; j <= M; ++j) d.nu.push_back(n[j] - d.n_min);
    for (std::size_t p = 0; p < M; ++p) {
        const FactorSpec& f = spec.factors[p];
        const FactorSpec b = f.base();
        double w;
        if (f.kind == FactorKind::induced) {
            if (f.n_out != d.n_min)
                throw std::invalid_argument("induced factor size differs from N_min of the chain");
            w = static_cast<double>(std::max(b.n_out, b.n_in) - std::min(b.n_out, b.n_in));
        } else {
            // nonzero eigenvalues are cyclic, so every factor reads as N_j x N_min
            w = static_cast<double>(n[p + 1] - d.n_min);
        }
        d.weight_nu.push_back(w);
        if (b.kind == FactorKind::jacobi) {
            const Rational k = kappa_from_bath(b.bath_dim, b.n_out, b.n_in, spec.dyson, b.bath_check);
            d.kappa[p] = k;
            // kappa + nu + N_min, i.e. kappa plus both base dimensions minus N_min
            d.mu[p] = k.value() + static_cast<double>(b.n_out + b.n_in) - static_cast<double>(d.n_min);
            if (!(d.mu[p] > w))
                throw std::invalid_argument("Jacobi factor " + std::to_string(p + 1) +
                                            " has mu <= nu; bath too small");
            d.i2.push_back(p);
        } else {
            d.i1.push_back(p);
        }
    }
    d.m1 = d.i1.size();
    d.m2 = d.i2.size();
    return d;
}

struct ProductRealization {
    ChainSpec spec;
    std::vector<DenseMatrix> factor_matrices;
    DenseMatrix product;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

inline DenseMatrix ordered_product(const std::vector<DenseMatrix>& xs) {
    if (xs.empty()) throw std::invalid_argument("empty product");
    CMatrix p = xs.front().entries;
    for (std::size_t j = 1; j < xs.size(); ++j) p = xs[j].entries * p;
    return DenseMatrix(std::move(p), xs.front().dyson);
}

inline ProductRealization sample_chain(const ChainSpec& spec, SeededStream& s) {
    validate(spec);
    ProductRealization r;
    r.spec = spec;
    r.master_seed = s.master_seed();
    r.stream_index = s.stream_index();
    for (const auto& f : spec.factors) r.factor_matrices.push_back(sample_factor(f, spec.dyson, s));
    r.product = ordered_product(r.factor_matrices);
    return r;
}

struct ReducedChain {
    DenseMatrix u_left;                      // gamma N_M x gamma N_min, orthonormal columns
    std::vector<DenseMatrix> square_factors; // N_min x N_min, same order as the chain
    DenseMatrix u_right;                     // gamma N_min x gamma N_0, orthonormal rows

    DenseMatrix square_product() const { return ordered_product(square_factors); }
    DenseMatrix reconstruct() const {
        const DenseMatrix inner = square_product();
        return DenseMatrix(u_left.entries * inner.entries * u_right.entries, inner.dyson);
    }
};

// Left block decompositions for factors past the pivot, right ones up to it.
// Square steps are copied without decomposition, so an all-square chain is
// returned unchanged with identity isometries.
inline ReducedChain reduce_to_square(const ProductRealization& r, std::size_t pivot) {
    const auto n = r.spec.dims();
    const std::size_t M = r.spec.size();
    if (pivot > M) throw std::invalid_argument("pivot out of range");
    const std::size_t n_min = *std::min_element(n.begin(), n.end());
    if (n[pivot] != n_min) throw std::invalid_argument("pivot dimension is not minimal");
    const DysonClass d = r.spec.dyson;
    const Index g = d.gamma();
    const Index m = g * static_cast<Index>(n_min);

    ReducedChain out;
    out.square_factors.resize(M);

    CMatrix q = CMatrix::Identity(m, m);
    for (std::size_t p = pivot; p < M; ++p) {
        const CMatrix a = r.factor_matrices[p].entries * q;
        if (a.rows() == m) {
            out.square_factors[p] = DenseMatrix(a, d);
            q = CMatrix::Identity(m, m);
        } else {
            ThinQR f = thin_qr(a, d);
            out.square_factors[p] = DenseMatrix(std::move(f.r), d);
            q = std::move(f.q);
        }
    }
    out.u_left = DenseMatrix(q, d);

    CMatrix pr = CMatrix::Identity(m, m);
    for (std::size_t p = pivot; p-- > 0;) {
        const CMatrix a = pr * r.factor_matrices[p].entries;
        if (a.cols() == m) {
            out.square_factors[p] = DenseMatrix(a, d);
            pr = CMatrix::Identity(m, m);
        } else {
            ThinQR f = thin_qr(a.adjoint(), d);
            out.square_factors[p] = DenseMatrix(f.r.adjoint(), d);
            pr = f.q.adjoint();
        }
    }
    out.u_right = DenseMatrix(pr, d);
    return out;
}

inline ReducedChain reduce_to_square(const ProductRealization& r) {
    const auto n = r.spec.dims();
    const auto pivot = static_cast<std::size_t>(std::min_element(n.begin(), n.end()) - n.begin());
    return reduce_to_square(r, pivot);
}

// B = X T with (B v)_j = X_j v_{j-1}, v_0 identified with v_M.
inline DenseMatrix assemble_ring_operator(const ProductRealization& r) {
    if (!r.spec.closed()) throw std::invalid_argument("ring operator needs a closed chain");
    const std::size_t M = r.spec.size();
    const Index g = r.spec.dyson.gamma();
    const auto n = r.spec.dims();
    std::vector<Index> offset(M + 1, 0);  // offset of block v_j, j = 1..M
    for (std::size_t j = 1; j <= M; ++j) offset[j] = offset[j - 1] + g * static_cast<Index>(n[j]);
    const Index total = offset[M];
    CMatrix b = CMatrix::Zero(total, total);
    for (std::size_t j = 1; j <= M; ++j) {
        const CMatrix& x = r.factor_matrices[j - 1].entries;
        const Index row = offset[j - 1];
        const Index col = j == 1 ? offset[M - 1] : offset[j - 2];
        b.block(row, col, x.rows(), x.cols()) = x;
    }
    return DenseMatrix(std::move(b), r.spec.dyson);
}

// Square chain whose product has the same nonzero spectrum in distribution.
inline ChainSpec induced_equivalent(const ChainSpec& spec) {
    const DerivedIndices idx = derive_indices(spec);
    const auto n = spec.dims();
    ChainSpec out{spec.dyson, {}};
    for (std::size_t p = 0; p < spec.size(); ++p) {
        const FactorSpec& f = spec.factors[p];
        if (f.kind == FactorKind::induced) {
            out.factors.push_back(f);
            continue;
        }
        FactorSpec base = f;
        base.n_out = n[p + 1];
        base.n_in = idx.n_min;
        out.factors.push_back(FactorSpec::induced(base));
    }
    return out;
}

inline bool all_square(const ChainSpec& spec) {
    return std::all_of(spec.factors.begin(), spec.factors.end(),
                       [](const FactorSpec& f) { return f.is_square(); });
}

// omega[k] is the 0-based position in the input of the factor placed at k.
inline ChainSpec permute_spec(const ChainSpec& spec, const std::vector<std::size_t>& omega) {
    const std::size_t M = spec.size();
    if (omega.size() != M) throw std::invalid_argument("permutation length differs from chain length");
    std::vector<std::size_t> sorted = omega;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < M; ++k)
        if (sorted[k] != k) throw std::invalid_argument("not a permutation");
    ChainSpec out{spec.dyson, {}};
    for (std::size_t k = 0; k < M; ++k) out.factors.push_back(spec.factors[omega[k]]);
    for (std::size_t j = 1; j < M; ++j)
        if (out.factors[j].n_in != out.factors[j - 1].n_out)
            throw std::invalid_argument("permuted rectangular chain does not chain");
    return out;
}

} // namespace rmtprod
