#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "dyson.hpp"

namespace rmtprod {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Dense storage is always complex. Real matrices keep zero imaginary parts,
// quaternion matrices are stored as 2x2 complex blocks [[a, b], [-conj(b), conj(a)]].
struct DenseMatrix {
    CMatrix entries;
    DysonClass dyson;

    DenseMatrix() = default;
    DenseMatrix(CMatrix e, DysonClass d) : entries(std::move(e)), dyson(d) {
        if (entries.rows() % d.gamma() != 0 || entries.cols() % d.gamma() != 0)
            throw std::invalid_argument("stored shape is not a multiple of the block size");
    }

    Index rows() const { return entries.rows() / dyson.gamma(); }
    Index cols() const { return entries.cols() / dyson.gamma(); }
    Index stored_rows() const { return entries.rows(); }
    Index stored_cols() const { return entries.cols(); }
    bool is_square() const { return entries.rows() == entries.cols(); }
};

// Block-diagonal J with blocks [[0, 1], [-1, 0]], acting on 2n stored rows.
inline CMatrix symplectic_unit(Index n) {
    CMatrix j = CMatrix::Zero(2 * n, 2 * n);
    for (Index k = 0; k < n; ++k) {
        j(2 * k, 2 * k + 1) = 1.0;
        j(2 * k + 1, 2 * k) = -1.0;
    }
    return j;
}

// ||X + J conj(X) J||, zero exactly for quaternion-structured storage.
inline double quaternion_defect(const CMatrix& x) {
    if (x.rows() % 2 || x.cols() % 2) return std::numeric_limits<double>::infinity();
    const CMatrix jl = symplectic_unit(x.rows() / 2);
    const CMatrix jr = symplectic_unit(x.cols() / 2);
    return (x + jl * x.conjugate() * jr).norm();
}

// Partner column -J conj(v) of a quaternion column pair.
inline CVector quaternion_partner(const CVector& v) {
    CVector w(v.size());
    for (Index k = 0; k + 1 < v.size(); k += 2) {
        w(k) = -std::conj(v(k + 1));
        w(k + 1) = std::conj(v(k));
    }
    return w;
}

inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (!(a.dyson == b.dyson)) throw std::invalid_argument("Dyson class mismatch in product");
    if (a.stored_cols() != b.stored_rows()) throw std::invalid_argument("dimension mismatch in product");
    return DenseMatrix(a.entries * b.entries, a.dyson);
}

inline DenseMatrix identity_matrix(Index n, DysonClass d) {
    return DenseMatrix(CMatrix::Identity(d.gamma() * n, d.gamma() * n), d);
}

struct ThinQR {
    CMatrix q;  // isometry, stored rows x stored cols of the input
    CMatrix r;  // square, upper triangular for beta 1, 2
};

// Thin QR respecting the Dyson class: for beta 4 the columns are produced in
// quaternion pairs (v, -J conj v) so Q keeps the block structure exactly.
// Diagonal entries of R are made real and nonnegative.
inline ThinQR thin_qr(const CMatrix& a, DysonClass d) {
    const Index m = a.rows(), n = a.cols();
    if (n > m) throw std::invalid_argument("thin QR needs rows >= cols");
    ThinQR out;
    if (!d.is_quaternion()) {
        Eigen::HouseholderQR<CMatrix> qr(a);
        out.q = qr.householderQ() * CMatrix::Identity(m, n);
        CMatrix r = qr.matrixQR().topRows(n).template triangularView<Eigen::Upper>();
        for (Index k = 0; k < n; ++k) {
            const double mod = std::abs(r(k, k));
            const cplx ph = mod > 0 ? r(k, k) / mod : cplx(1.0);
            out.q.col(k) *= ph;
            r.row(k) *= std::conj(ph);
        }
        if (d.is_real()) {
            out.q = out.q.real().cast<cplx>();
            r = r.real().cast<cplx>();
        }
        out.r = std::move(r);
        return out;
    }
    out.q.resize(m, n);
    for (Index k = 0; k < n; k += 2) {
        CVector v = a.col(k);
        for (int pass = 0; pass < 2; ++pass)
            for (Index p = 0; p < k; ++p) v -= out.q.col(p) * out.q.col(p).dot(v);
        const double nv = v.norm();
        if (nv == 0.0) throw std::runtime_error("rank-deficient input to quaternion QR");
        v /= nv;
        out.q.col(k) = v;
        out.q.col(k + 1) = quaternion_partner(v);
    }
    out.r = out.q.adjoint() * a;
    return out;
}

} // namespace rmtprod
