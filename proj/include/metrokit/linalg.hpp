#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace metrokit {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline Matrix hermitize(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

inline bool is_hermitian(const Matrix& a, double tol = 1e-9) {
    if (a.rows() != a.cols()) return false;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Column-stacking vectorization: vec(A X B) = (B^T (x) A) vec(X).
inline Vector vec(const Matrix& a) {
    Vector v(a.size());
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) v(idx++) = a(i, j);
    return v;
}

inline Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
    Matrix a(rows, cols);
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = v(idx++);
    return a;
}

// exp(-i H t) for Hermitian H, via eigendecomposition.
inline Matrix expm_hermitian_generator(const Matrix& h, double t, double tol = 1e-9) {
    if (!is_hermitian(h, tol * (1.0 + h.cwiseAbs().maxCoeff())))
        throw std::invalid_argument("expm_hermitian_generator: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h));
    const Cplx mi(0.0, -1.0);
    Vector phases = (mi * t * es.eigenvalues().cast<Cplx>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// PSD square root with eigenvalue clipping at zero. Eigenvalues below
// rel_cutoff * lambda_max are zeroed so that roundoff in rank-deficient
// inputs is not amplified by the square root.
inline Matrix sqrt_psd(const Matrix& a, double rel_cutoff = 0.0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    if (rel_cutoff > 0.0) {
        const double floor = rel_cutoff * ev.maxCoeff();
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev(i) < floor) ev(i) = 0.0;
    }
    ev = ev.cwiseSqrt();
    return es.eigenvectors() * ev.cast<Cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

inline double min_eigenvalue(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a));
    return es.eigenvalues().minCoeff();
}

inline double operator_norm(const Matrix& a) {
    return Eigen::JacobiSVD<Matrix>(a).singularValues().maxCoeff();
}

inline double trace_norm_svd(const Matrix& a) {
    return Eigen::JacobiSVD<Matrix>(a).singularValues().sum();
}

inline Matrix pauli_x() { return (Matrix(2, 2) << 0, 1, 1, 0).finished(); }
inline Matrix pauli_y() {
    return (Matrix(2, 2) << 0, Cplx(0, -1), Cplx(0, 1), 0).finished();
}
inline Matrix pauli_z() { return (Matrix(2, 2) << 1, 0, 0, -1).finished(); }

}  // namespace metrokit
