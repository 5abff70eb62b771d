#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

#include "dense.hpp"
#include "dyson.hpp"
#include "random.hpp"

namespace rmtprod {

enum class FactorKind { ginibre, jacobi, induced };

// strict: L >= n_out + n_in. subblock: any L > max(n_out, n_in); square
// corners of small baths fall here.
enum class BathCheck { strict, subblock };

struct invalid_bath : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct FactorSpec {
    FactorKind kind = FactorKind::ginibre;
    std::size_t n_out = 0;
    std::size_t n_in = 0;
    std::size_t bath_dim = 0;
    BathCheck bath_check = BathCheck::strict;
    // Base ensemble of an induced factor; n_out = n_in = min(base_out, base_in).
    FactorKind base_kind = FactorKind::ginibre;
    std::size_t base_out = 0;
    std::size_t base_in = 0;

    static FactorSpec ginibre(std::size_t out, std::size_t in) {
        FactorSpec f;
        f.n_out = out;
        f.n_in = in;
        return f;
    }
    static FactorSpec jacobi(std::size_t out, std::size_t in, std::size_t L,
                             BathCheck check = BathCheck::strict) {
        FactorSpec f;
        f.kind = FactorKind::jacobi;
        f.n_out = out;
        f.n_in = in;
        f.bath_dim = L;
        f.bath_check = check;
        return f;
    }
    static FactorSpec induced(const FactorSpec& base) {
        if (base.kind == FactorKind::induced) return base;
        FactorSpec f = base;
        f.kind = FactorKind::induced;
        f.base_kind = base.kind;
        f.base_out = base.n_out;
        f.base_in = base.n_in;
        f.n_out = f.n_in = std::min(base.n_out, base.n_in);
        return f;
    }

    // Rectangular ensemble that an induced factor is derived from.
    FactorSpec base() const {
        if (kind != FactorKind::induced) return *this;
        FactorSpec b = *this;
        b.kind = base_kind;
        b.n_out = base_out;
        b.n_in = base_in;
        b.base_out = b.base_in = 0;
        return b;
    }

    bool is_square() const { return n_out == n_in; }
};

inline const char* kind_name(FactorKind k) {
    switch (k) {
    case FactorKind::ginibre: return "ginibre";
    case FactorKind::jacobi: return "jacobi";
    case FactorKind::induced: return "induced";
    }
    return "?";
}

inline void check_bath(std::size_t L, std::size_t n_out, std::size_t n_in, BathCheck check) {
    if (check == BathCheck::strict) {
        if (L < n_out + n_in)
            throw invalid_bath("bath dimension " + std::to_string(L) + " below n_out + n_in = " +
                               std::to_string(n_out + n_in));
    } else if (L <= std::max(n_out, n_in)) {
        throw invalid_bath("bath dimension " + std::to_string(L) + " must exceed max(n_out, n_in)");
    }
}

// kappa = beta (L - n_out - n_in + 1 - 2/beta) / (2 gamma)
inline Rational kappa_from_bath(std::size_t L, std::size_t n_out, std::size_t n_in, DysonClass d,
                                BathCheck check = BathCheck::strict) {
    check_bath(L, n_out, n_in, check);
    const auto excess = static_cast<std::int64_t>(L) - static_cast<std::int64_t>(n_out) -
                        static_cast<std::int64_t>(n_in) + 1;
    return Rational(d.beta * excess - 2, 2 * d.gamma());
}

// beta 1: real N(0,1). beta 2: E|x|^2 = 1. beta 4: quaternion entries with
// E|a|^2 = E|b|^2 = 1/2, the scale reached by sqrt(L) times a truncated
// symplectic matrix and the one used by the beta 4 analytics.
inline DenseMatrix sample_ginibre(std::size_t rows, std::size_t cols, DysonClass d, SeededStream& s) {
    const auto r = static_cast<Index>(rows), c = static_cast<Index>(cols);
    CMatrix x(d.gamma() * r, d.gamma() * c);
    if (d.is_real()) {
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i) x(i, j) = s.normal();
    } else if (!d.is_quaternion()) {
        const double sd = std::sqrt(0.5);
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i) x(i, j) = s.complex_normal(sd);
    } else {
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i) {
                const cplx a = s.complex_normal(0.5);
                const cplx b = s.complex_normal(0.5);
                x(2 * i, 2 * j) = a;
                x(2 * i, 2 * j + 1) = b;
                x(2 * i + 1, 2 * j) = -std::conj(b);
                x(2 * i + 1, 2 * j + 1) = std::conj(a);
            }
    }
    return DenseMatrix(std::move(x), d);
}

// First n_in columns of a Haar element of size L: uniform on the Stiefel manifold.
inline CMatrix sample_haar_columns(std::size_t L, std::size_t n_in, DysonClass d, SeededStream& s) {
    const DenseMatrix g = sample_ginibre(L, n_in, d, s);
    return thin_qr(g.entries, d).q;
}

inline DenseMatrix sample_haar(std::size_t n, DysonClass d, SeededStream& s) {
    if (n == 0) throw std::invalid_argument("Haar sample of size 0");
    return DenseMatrix(sample_haar_columns(n, n, d, s), d);
}

// Top-left n_out x n_in block of a Haar element of size L. Only the first
// n_in columns of the unitary are generated.
inline DenseMatrix sample_truncation(std::size_t n_out, std::size_t n_in, std::size_t L, DysonClass d,
                                     SeededStream& s, BathCheck check = BathCheck::strict) {
    check_bath(L, n_out, n_in, check);
    const CMatrix cols = sample_haar_columns(L, n_in, d, s);
    return DenseMatrix(cols.topRows(d.gamma() * static_cast<Index>(n_out)), d);
}

inline Eigen::VectorXd stored_singular_values(const CMatrix& x) {
    if (x.size() == 0) return Eigen::VectorXd();
    Eigen::BDCSVD<CMatrix> svd(x);
    return svd.singularValues();
}

inline DenseMatrix sample_factor(const FactorSpec& f, DysonClass d, SeededStream& s);

// U1 diag(sigma) U2 with sigma the nonzero singular values of a fresh base sample.
inline DenseMatrix sample_induced_square(const FactorSpec& factor, std::size_t n_min, DysonClass d,
                                         SeededStream& s) {
    const FactorSpec base = factor.base();
    if (base.kind == FactorKind::induced) throw std::invalid_argument("nested induced factor");
    if (std::min(base.n_out, base.n_in) != n_min)
        throw std::invalid_argument("induced factor size does not match min(base dimensions)");
    if (factor.kind == FactorKind::induced && factor.n_out != n_min)
        throw std::invalid_argument("induced factor must be square of size n_min");
    if (n_min == 0) return DenseMatrix(CMatrix(0, 0), d);
    const DenseMatrix x = sample_factor(base, d, s);
    const Eigen::VectorXd sv = stored_singular_values(x.entries);
    const Index g = d.gamma(), n = static_cast<Index>(n_min);
    Eigen::VectorXd sigma(g * n);
    for (Index k = 0; k < n; ++k)
        for (Index t = 0; t < g; ++t) sigma(g * k + t) = sv(g * k);
    const DenseMatrix u1 = sample_haar(n_min, d, s);
    const DenseMatrix u2 = sample_haar(n_min, d, s);
    CMatrix y = u1.entries * sigma.cast<cplx>().asDiagonal() * u2.entries;
    return DenseMatrix(std::move(y), d);
}

inline DenseMatrix sample_factor(const FactorSpec& f, DysonClass d, SeededStream& s) {
    switch (f.kind) {
    case FactorKind::ginibre: return sample_ginibre(f.n_out, f.n_in, d, s);
    case FactorKind::jacobi: return sample_truncation(f.n_out, f.n_in, f.bath_dim, d, s, f.bath_check);
    case FactorKind::induced: return sample_induced_square(f, f.n_out, d, s);
    }
    throw std::logic_error("unknown factor kind");
}

} // namespace rmtprod
