#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace gsdst {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Dense complex matrix, row-major, immutable once built.
///
/// Construction validates the shape (both dimensions >= 1) and that every
/// entry is finite.
class ComplexMatrix {
public:
    using Generator = std::function<Complex(std::size_t, std::size_t)>;

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
    ComplexMatrix(std::size_t rows, std::size_t cols, const Generator& generate);
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix zeros(std::size_t rows, std::size_t cols);
    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const Complex> values, std::size_t rows,
                                  std::size_t cols);
    static ComplexMatrix diagonal(std::span<const Complex> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    Complex operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    std::span<const Complex> entries() const noexcept { return entries_; }
    ComplexVector column(std::size_t c) const;

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    double frobenius_norm() const;

    /// Copy with columns `a` and `b` exchanged.
    ComplexMatrix with_swapped_columns(std::size_t a, std::size_t b) const;

    friend ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
    friend ComplexMatrix operator+(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
    friend ComplexMatrix operator-(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
    friend ComplexMatrix operator*(Complex scale, const ComplexMatrix& m);
    friend ComplexVector operator*(const ComplexMatrix& m, std::span<const Complex> x);

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Complex> entries_;
};

/// Determinant carried as mantissa * 2^exponent so that products of many
/// large pivots do not overflow before the caller decides what to do.
struct ScaledDeterminant {
    Complex mantissa{0.0, 0.0};
    long exponent = 0;

    bool is_zero() const noexcept { return mantissa == Complex{0.0, 0.0}; }
    Complex value() const;
    /// Natural log of |det|; -inf for a singular matrix.
    double log_abs() const;
    /// det / |det|; zero for a singular matrix.
    Complex phase() const;
};

/// Pivoted-LU determinant of a square matrix.
Complex determinant(const ComplexMatrix& m);
ScaledDeterminant scaled_determinant(const ComplexMatrix& m);

namespace detail {
/// Destroys `a` (n*n row-major). Used on scratch buffers in hot loops.
ScaledDeterminant lu_determinant_inplace(std::span<Complex> a, std::size_t n);
} // namespace detail

struct SingularValueDecomposition {
    ComplexMatrix u;                     ///< rows x p, orthonormal columns
    std::vector<double> singular_values; ///< p values, descending
    ComplexMatrix v;                     ///< cols x p, orthonormal columns
};

/// Thin SVD, p = min(rows, cols). m ~= u * diag(sigma) * v^H.
SingularValueDecomposition svd(const ComplexMatrix& m);

/// Best rank-k approximation in Frobenius norm.
ComplexMatrix rank_truncate(const ComplexMatrix& m, std::size_t k);

/// Relative cutoff below which singular values are discarded in least_squares.
inline constexpr double kPseudoInverseCutoff = 1e-12;

/// argmin_x ||a x - b||_2 via the SVD pseudo-inverse. Requires rows >= cols.
ComplexVector least_squares(const ComplexMatrix& a, std::span<const Complex> b);

/// All roots of sum_i c[i] x^(n-i) (degree-descending coefficients).
///
/// Companion-matrix eigenvalues followed by Newton polishing, which keeps
/// the residual at the level of the coefficient rounding for the small
/// degrees used here.
ComplexVector polynomial_roots(std::span<const Complex> coefficients);

/// Horner evaluation of a degree-descending polynomial.
Complex evaluate_polynomial(std::span<const Complex> coefficients, Complex x);

} // namespace gsdst
