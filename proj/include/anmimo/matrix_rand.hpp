#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "anmimo/common.hpp"
#include "anmimo/rng.hpp"

namespace anmimo {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline CMatrix sample_gaussian(int rows, int cols, Rng& rng) {
    CMatrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = rng.complex_gaussian();
    return m;
}

namespace detail {

// Two-pass (re-orthogonalized) modified Gram-Schmidt against the columns
// already stored in q[0..filled). Returns the residual norm before
// normalization; the caller decides whether the column survives.
inline double orthogonalize_against(CMatrix& q, int filled, CVector& v) {
    for (int pass = 0; pass < 2; ++pass)
        for (int j = 0; j < filled; ++j) v -= q.col(j).dot(v) * q.col(j);
    return v.norm();
}

}  // namespace detail

// Haar-distributed n x p semi-unitary matrix. Gram-Schmidt on an i.i.d.
// complex Gaussian matrix normalizes by real positive norms, so this is the
// positive-diagonal QR factor; no extra phase correction is needed for
// exact Haar distribution.
inline CMatrix sample_haar_semiunitary(int n, int p, Rng& rng) {
    if (n < 1 || p < 1 || p > n) throw DomainError("sample_haar_semiunitary: need n >= p >= 1");
    CMatrix q(n, p);
    for (int k = 0; k < p; ++k) {
        CVector v(n);
        double norm = 0.0;
        do {
            for (int i = 0; i < n; ++i) v(i) = rng.complex_gaussian();
            norm = detail::orthogonalize_against(q, k, v);
        } while (norm < 1e-8);  // astronomically rare; resampling keeps the law exact
        q.col(k) = v / norm;
    }
    return q;
}

inline bool is_semiunitary(const CMatrix& m, double tol = 1e-10) {
    const CMatrix g = m.adjoint() * m;
    return (g - CMatrix::Identity(m.cols(), m.cols())).norm() <= tol;
}

struct SvdBasis {
    CMatrix v_tilde;  // n_a x n_b, spans the row space of h
    CMatrix z;        // n_a x (n_a - n_b), spans the null space of h
    Eigen::VectorXd singular_values;  // descending
};

inline SvdBasis svd_right_basis(const CMatrix& h) {
    const int n_b = static_cast<int>(h.rows());
    const int n_a = static_cast<int>(h.cols());
    if (n_b >= n_a) throw DomainError("svd_right_basis: need rows < cols");
    Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s(n_b - 1) < 1e-12 * s(0)) throw NumericalError("svd_right_basis: rank-deficient channel");
    SvdBasis basis;
    basis.v_tilde = svd.matrixV().leftCols(n_b);
    basis.z = svd.matrixV().rightCols(n_a - n_b);
    basis.singular_values = s;
    return basis;
}

// Completes a semi-unitary n x p matrix to a unitary n x n one. The first p
// columns are v_j unchanged; the remainder is the Gram-Schmidt completion
// over the standard basis e_1, e_2, ... in order, skipping candidates whose
// residual drops below 1e-8.
inline CMatrix gram_schmidt_complete(const CMatrix& v_j) {
    const int n = static_cast<int>(v_j.rows());
    const int p = static_cast<int>(v_j.cols());
    if (p > n) throw DomainError("gram_schmidt_complete: more columns than rows");
    CMatrix q(n, n);
    q.leftCols(p) = v_j;
    int filled = p;
    for (int k = 0; k < n && filled < n; ++k) {
        CVector v = CVector::Zero(n);
        v(k) = 1.0;
        const double norm = detail::orthogonalize_against(q, filled, v);
        if (norm < 1e-8) continue;
        q.col(filled++) = v / norm;
    }
    if (filled < n)
        throw NumericalError("gram_schmidt_complete: standard basis did not span the complement");
    return q;
}

// log2 det(I + a) for Hermitian PSD a, via the eigenvalues of a.
inline double log_det_eye_plus(const CMatrix& a) {
    if (a.rows() != a.cols()) throw DomainError("log_det_eye_plus: matrix must be square");
    const double scale = std::max(1.0, a.norm());
    if ((a - a.adjoint()).norm() > 1e-10 * scale)
        throw DomainError("log_det_eye_plus: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> eig((a + a.adjoint()) * 0.5,
                                               Eigen::EigenvaluesOnly);
    double bits = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        const double lambda = eig.eigenvalues()(i);
        if (1.0 + lambda < 1e-12) throw NumericalError("log_det_eye_plus: input is not PSD");
        bits += std::log1p(lambda) * kLog2E;
    }
    return bits;
}

}  // namespace anmimo
