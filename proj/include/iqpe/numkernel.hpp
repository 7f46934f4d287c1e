#pragma once

// Dense complex linear algebra for small Hilbert spaces (dim <= 2^12).

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iqpe {

using Complex = std::complex<double>;

inline constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 12;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a result would exceed the configured dimension cap, or when
/// operand shapes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

class NotHermitianError : public Error {
public:
    using Error::Error;
};

/// The eigensolver did not reach the reconstruction tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class CVector {
public:
    CVector() = default;
    explicit CVector(std::size_t dim) : amps_(dim) {}
    explicit CVector(std::vector<Complex> amps) : amps_(std::move(amps)) {}
    CVector(std::initializer_list<Complex> amps) : amps_(amps) {}

    static CVector basis(std::size_t dim, std::size_t index);

    std::size_t dim() const noexcept { return amps_.size(); }
    Complex& operator[](std::size_t i) { return amps_[i]; }
    const Complex& operator[](std::size_t i) const { return amps_[i]; }
    std::span<Complex> amplitudes() noexcept { return amps_; }
    std::span<const Complex> amplitudes() const noexcept { return amps_; }

    double norm() const;
    bool is_normalized(double tol = 1e-12) const;

private:
    std::vector<Complex> amps_;
};

Complex inner(const CVector& a, const CVector& b);  // <a|b>
CVector operator-(const CVector& a, const CVector& b);
CVector operator*(Complex s, const CVector& v);
CVector tensor_product(const CVector& a, const CVector& b);

/// Row-major dense complex matrix.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}
    CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(std::span<const Complex> diag);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<const Complex> data() const noexcept { return data_; }

    CMatrix adjoint() const;
    CVector column(std::size_t c) const;

    CMatrix& operator+=(const CMatrix& other);
    CMatrix& operator-=(const CMatrix& other);
    CMatrix& operator*=(Complex s);

    bool is_unitary(double tol = 1e-10) const;
    bool is_hermitian(double tol = 1e-12) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(Complex s, CMatrix m);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CVector operator*(const CMatrix& m, const CVector& v);

/// Largest entrywise modulus, the ||.||_max norm used for every tolerance.
double max_abs(const CMatrix& m);
double max_abs_diff(const CMatrix& a, const CMatrix& b);
CMatrix commutator(const CMatrix& a, const CMatrix& b);

/// Kronecker product a (x) b. Row index of the result is ra * b.rows() + rb.
CMatrix tensor_product(const CMatrix& a, const CMatrix& b,
                       std::size_t max_dim = kDefaultMaxDim);

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    CMatrix eigenvectors;             // column j pairs with eigenvalues[j]

    std::size_t dim() const noexcept { return eigenvalues.size(); }
    CVector eigenvector(std::size_t j) const { return eigenvectors.column(j); }
};

/// Full Hermitian eigendecomposition. Rejects inputs that are not Hermitian
/// within 1e-12 and verifies the reconstruction residual before returning.
EigenDecomposition hermitian_eigendecompose(const CMatrix& h,
                                            std::size_t max_dim = kDefaultMaxDim);

/// V diag(exp(sign * i * lambda_n * tau)) V^dagger.
CMatrix unitary_exp(const EigenDecomposition& decomp, double tau, int sign = -1);

}  // namespace iqpe
