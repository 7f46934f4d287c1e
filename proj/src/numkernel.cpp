#include "iqpe/numkernel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace iqpe {

CVector CVector::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw DimensionError("basis index out of range");
    }
    CVector v(dim);
    v[index] = 1.0;
    return v;
}

double CVector::norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

bool CVector::is_normalized(double tol) const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::abs(s - 1.0) <= tol;
}

Complex inner(const CVector& a, const CVector& b) {
    if (a.dim() != b.dim()) throw DimensionError("inner: dimension mismatch");
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

CVector operator-(const CVector& a, const CVector& b) {
    if (a.dim() != b.dim()) throw DimensionError("vector difference: dimension mismatch");
    CVector r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] - b[i];
    return r;
}

CVector operator*(Complex s, const CVector& v) {
    CVector r(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) r[i] = s * v[i];
    return r;
}

CVector tensor_product(const CVector& a, const CVector& b) {
    CVector r(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) r[i * b.dim() + j] = a[i] * b[j];
    return r;
}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("CMatrix: entry count does not match rows*cols");
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> diag) {
    CMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

CVector CMatrix::column(std::size_t c) const {
    if (c >= cols_) throw DimensionError("column index out of range");
    CVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("matrix sum: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("matrix difference: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
    for (auto& x : data_) x *= s;
    return *this;
}

bool CMatrix::is_unitary(double tol) const {
    if (!is_square()) return false;
    return max_abs_diff(adjoint() * (*this), identity(rows_)) <= tol;
}

bool CMatrix::is_hermitian(double tol) const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
    return true;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(Complex s, CMatrix m) { return m *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matrix product: inner dimensions differ");
    CMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    }
    return r;
}

CVector operator*(const CMatrix& m, const CVector& v) {
    if (m.cols() != v.dim()) throw DimensionError("matrix-vector product: dimension mismatch");
    CVector r(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

double max_abs(const CMatrix& m) {
    double best = 0.0;
    for (const auto& x : m.data()) best = std::max(best, std::abs(x));
    return best;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_abs_diff: shape mismatch");
    double best = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        best = std::max(best, std::abs(a.data()[i] - b.data()[i]));
    return best;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

CMatrix tensor_product(const CMatrix& a, const CMatrix& b, std::size_t max_dim) {
    const std::size_t rows = a.rows() * b.rows();
    const std::size_t cols = a.cols() * b.cols();
    if (rows > max_dim || cols > max_dim) {
        std::ostringstream os;
        os << "tensor_product: result " << rows << "x" << cols << " exceeds dimension cap " << max_dim;
        throw DimensionError(os.str());
    }
    CMatrix r(rows, cols);
    for (std::size_t ia = 0; ia < a.rows(); ++ia)
        for (std::size_t ja = 0; ja < a.cols(); ++ja) {
            const Complex x = a(ia, ja);
            if (x == Complex{}) continue;
            for (std::size_t ib = 0; ib < b.rows(); ++ib)
                for (std::size_t jb = 0; jb < b.cols(); ++jb)
                    r(ia * b.rows() + ib, ja * b.cols() + jb) = x * b(ib, jb);
        }
    return r;
}

EigenDecomposition hermitian_eigendecompose(const CMatrix& h, std::size_t max_dim) {
    if (!h.is_square()) throw DimensionError("hermitian_eigendecompose: matrix is not square");
    if (h.rows() == 0) throw DimensionError("hermitian_eigendecompose: empty matrix");
    if (h.rows() > max_dim) {
        std::ostringstream os;
        os << "hermitian_eigendecompose: dimension " << h.rows() << " exceeds cap " << max_dim;
        throw DimensionError(os.str());
    }
    if (!h.is_hermitian(1e-12)) throw NotHermitianError("hermitian_eigendecompose: input is not Hermitian");

    const auto n = static_cast<Eigen::Index>(h.rows());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = h(static_cast<std::size_t>(i), static_cast<std::size_t>(j));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("hermitian_eigendecompose: solver did not converge",
                               std::numeric_limits<double>::infinity());
    }

    EigenDecomposition out;
    out.eigenvalues.resize(h.rows());
    out.eigenvectors = CMatrix(h.rows(), h.cols());
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    for (Eigen::Index j = 0; j < n; ++j) {
        out.eigenvalues[static_cast<std::size_t>(j)] = vals(j);
        for (Eigen::Index i = 0; i < n; ++i)
            out.eigenvectors(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = vecs(i, j);
    }

    // Eigen already sorts ascending; the check keeps the invariant explicit.
    if (!std::is_sorted(out.eigenvalues.begin(), out.eigenvalues.end())) {
        std::vector<std::size_t> order(out.eigenvalues.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return out.eigenvalues[a] < out.eigenvalues[b]; });
        EigenDecomposition sorted{std::vector<double>(order.size()), CMatrix(h.rows(), h.cols())};
        for (std::size_t j = 0; j < order.size(); ++j) {
            sorted.eigenvalues[j] = out.eigenvalues[order[j]];
            for (std::size_t i = 0; i < h.rows(); ++i) sorted.eigenvectors(i, j) = out.eigenvectors(i, order[j]);
        }
        out = std::move(sorted);
    }

    // Reconstruction residual, scaled by the matrix magnitude so that the
    // 1e-9 bound is absolute for O(1) Hamiltonians.
    Eigen::MatrixXcd recon = vecs * vals.cast<std::complex<double>>().asDiagonal() * vecs.adjoint();
    const double residual = (recon - m).cwiseAbs().maxCoeff();
    const double tol = 1e-9 * std::max(1.0, m.cwiseAbs().maxCoeff());
    if (!(residual <= tol)) {
        std::ostringstream os;
        os << "hermitian_eigendecompose: reconstruction residual " << residual << " above " << tol;
        throw ConvergenceError(os.str(), residual);
    }
    return out;
}

CMatrix unitary_exp(const EigenDecomposition& decomp, double tau, int sign) {
    if (sign != 1 && sign != -1) throw Error("unitary_exp: sign must be +1 or -1");
    if (!std::isfinite(tau)) throw Error("unitary_exp: tau is not finite");
    const std::size_t n = decomp.dim();
    std::vector<Complex> phases(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double angle = decomp.eigenvalues[k] * tau;
        if (!std::isfinite(angle)) throw Error("unitary_exp: eigenvalue * tau overflows");
        phases[k] = std::polar(1.0, sign * angle);
    }
    const CMatrix& v = decomp.eigenvectors;
    CMatrix u(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex vik = v(i, k) * phases[k];
            if (vik == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) u(i, j) += vik * std::conj(v(j, k));
        }
    return u;
}

}  // namespace iqpe
