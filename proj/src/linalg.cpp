#include "gsdst/linalg.hpp"

#include "gsdst/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

namespace gsdst {

namespace {

bool all_finite(std::span<const Complex> values) {
    return std::all_of(values.begin(), values.end(), [](Complex z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

void require_shape(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw InputError("matrix dimensions must be >= 1, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
}

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
    return out;
}

ComplexMatrix from_eigen(const Eigen::MatrixXcd& m) {
    std::vector<Complex> entries(static_cast<std::size_t>(m.rows() * m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            entries[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
    return ComplexMatrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                         std::move(entries));
}

// Rescale z into [0.5, 1) by its larger component, moving the power of two
// into `exponent`.
void renormalize(Complex& z, long& exponent) {
    const double big = std::max(std::abs(z.real()), std::abs(z.imag()));
    if (big == 0.0) return;
    int e = 0;
    std::frexp(big, &e);
    z = Complex(std::ldexp(z.real(), -e), std::ldexp(z.imag(), -e));
    exponent += e;
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    require_shape(rows_, cols_);
    if (entries_.size() != rows_ * cols_) {
        throw InputError("matrix entry count " + std::to_string(entries_.size()) +
                         " does not match shape " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
    }
    if (!all_finite(entries_)) throw InputError("matrix entries must be finite");
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, const Generator& generate)
    : rows_(rows), cols_(cols) {
    require_shape(rows_, cols_);
    entries_.reserve(rows_ * cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) entries_.push_back(generate(r, c));
    if (!all_finite(entries_)) throw InputError("matrix entries must be finite");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
    require_shape(rows_, cols_);
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) throw InputError("ragged matrix initializer");
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
    if (!all_finite(entries_)) throw InputError("matrix entries must be finite");
}

ComplexMatrix ComplexMatrix::zeros(std::size_t rows, std::size_t cols) {
    require_shape(rows, cols);
    return ComplexMatrix(rows, cols, std::vector<Complex>(rows * cols));
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    return ComplexMatrix(n, n, [](std::size_t r, std::size_t c) {
        return r == c ? Complex{1.0, 0.0} : Complex{};
    });
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> values, std::size_t rows,
                                      std::size_t cols) {
    return ComplexMatrix(rows, cols, [&](std::size_t r, std::size_t c) {
        return (r == c && r < values.size()) ? values[r] : Complex{};
    });
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> values) {
    return diagonal(values, values.size(), values.size());
}

ComplexVector ComplexMatrix::column(std::size_t c) const {
    ComplexVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    return ComplexMatrix(cols_, rows_,
                         [this](std::size_t r, std::size_t c) { return std::conj((*this)(c, r)); });
}

ComplexMatrix ComplexMatrix::transpose() const {
    return ComplexMatrix(cols_, rows_, [this](std::size_t r, std::size_t c) { return (*this)(c, r); });
}

double ComplexMatrix::frobenius_norm() const {
    double sum = 0.0;
    for (Complex z : entries_) sum += std::norm(z);
    return std::sqrt(sum);
}

ComplexMatrix ComplexMatrix::with_swapped_columns(std::size_t a, std::size_t b) const {
    if (a >= cols_ || b >= cols_) throw InputError("column index out of range");
    return ComplexMatrix(rows_, cols_, [&](std::size_t r, std::size_t c) {
        const std::size_t src = c == a ? b : (c == b ? a : c);
        return (*this)(r, src);
    });
}

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    if (lhs.cols() != rhs.rows()) throw InputError("matrix product dimension mismatch");
    std::vector<Complex> out(lhs.rows() * rhs.cols());
    for (std::size_t r = 0; r < lhs.rows(); ++r)
        for (std::size_t i = 0; i < lhs.cols(); ++i) {
            const Complex a = lhs(r, i);
            for (std::size_t c = 0; c < rhs.cols(); ++c) out[r * rhs.cols() + c] += a * rhs(i, c);
        }
    return ComplexMatrix(lhs.rows(), rhs.cols(), std::move(out));
}

ComplexMatrix operator+(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols())
        throw InputError("matrix sum dimension mismatch");
    return ComplexMatrix(lhs.rows(), lhs.cols(),
                         [&](std::size_t r, std::size_t c) { return lhs(r, c) + rhs(r, c); });
}

ComplexMatrix operator-(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols())
        throw InputError("matrix difference dimension mismatch");
    return ComplexMatrix(lhs.rows(), lhs.cols(),
                         [&](std::size_t r, std::size_t c) { return lhs(r, c) - rhs(r, c); });
}

ComplexMatrix operator*(Complex scale, const ComplexMatrix& m) {
    return ComplexMatrix(m.rows(), m.cols(),
                         [&](std::size_t r, std::size_t c) { return scale * m(r, c); });
}

ComplexVector operator*(const ComplexMatrix& m, std::span<const Complex> x) {
    if (x.size() != m.cols()) throw InputError("matrix-vector dimension mismatch");
    ComplexVector out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out[r] += m(r, c) * x[c];
    return out;
}

Complex ScaledDeterminant::value() const {
    const int e = static_cast<int>(std::clamp(exponent, -100000L, 100000L));
    return {std::ldexp(mantissa.real(), e), std::ldexp(mantissa.imag(), e)};
}

double ScaledDeterminant::log_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(mantissa)) + static_cast<double>(exponent) * std::numbers::ln2;
}

Complex ScaledDeterminant::phase() const {
    if (is_zero()) return {};
    return mantissa / std::abs(mantissa);
}

namespace detail {

ScaledDeterminant lu_determinant_inplace(std::span<Complex> a, std::size_t n) {
    ScaledDeterminant det{{1.0, 0.0}, 0};
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot_row = col;
        double pivot_norm = std::norm(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double candidate = std::norm(a[r * n + col]);
            if (candidate > pivot_norm) {
                pivot_norm = candidate;
                pivot_row = r;
            }
        }
        if (pivot_norm == 0.0) return ScaledDeterminant{};
        if (pivot_row != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(a[col * n + c], a[pivot_row * n + c]);
            det.mantissa = -det.mantissa;
        }
        const Complex pivot = a[col * n + col];
        det.mantissa *= pivot;
        renormalize(det.mantissa, det.exponent);
        const Complex inv_pivot = 1.0 / pivot;
        for (std::size_t r = col + 1; r < n; ++r) {
            const Complex factor = a[r * n + col] * inv_pivot;
            if (factor == Complex{}) continue;
            for (std::size_t c = col + 1; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
        }
    }
    return det;
}

} // namespace detail

ScaledDeterminant scaled_determinant(const ComplexMatrix& m) {
    if (!m.is_square()) {
        throw InputError("determinant requires a square matrix, got " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()));
    }
    std::vector<Complex> scratch(m.entries().begin(), m.entries().end());
    return detail::lu_determinant_inplace(scratch, m.rows());
}

Complex determinant(const ComplexMatrix& m) { return scaled_determinant(m).value(); }

SingularValueDecomposition svd(const ComplexMatrix& m) {
    const Eigen::MatrixXcd a = to_eigen(m);
    Eigen::JacobiSVD<Eigen::MatrixXcd> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = solver.singularValues();
    std::vector<double> values(sigma.data(), sigma.data() + sigma.size());
    return {from_eigen(solver.matrixU()), std::move(values), from_eigen(solver.matrixV())};
}

ComplexMatrix rank_truncate(const ComplexMatrix& m, std::size_t k) {
    const std::size_t p = std::min(m.rows(), m.cols());
    if (k < 1 || k > p) {
        throw InputError("rank_truncate: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(p) + "]");
    }
    const auto d = svd(m);
    return ComplexMatrix(m.rows(), m.cols(), [&](std::size_t r, std::size_t c) {
        Complex sum{};
        for (std::size_t i = 0; i < k; ++i)
            sum += d.u(r, i) * d.singular_values[i] * std::conj(d.v(c, i));
        return sum;
    });
}

ComplexVector least_squares(const ComplexMatrix& a, std::span<const Complex> b) {
    if (a.rows() < a.cols()) throw InputError("least_squares requires rows >= cols");
    if (b.size() != a.rows()) {
        throw InputError("least_squares: right-hand side has length " + std::to_string(b.size()) +
                         ", expected " + std::to_string(a.rows()));
    }
    if (!all_finite(b)) throw InputError("least_squares: right-hand side must be finite");

    const auto d = svd(a);
    const double cutoff = kPseudoInverseCutoff * d.singular_values.front();
    ComplexVector x(a.cols());
    for (std::size_t i = 0; i < d.singular_values.size(); ++i) {
        const double sigma = d.singular_values[i];
        if (sigma <= cutoff || sigma == 0.0) continue;
        Complex projection{};
        for (std::size_t r = 0; r < a.rows(); ++r) projection += std::conj(d.u(r, i)) * b[r];
        projection /= sigma;
        for (std::size_t c = 0; c < a.cols(); ++c) x[c] += d.v(c, i) * projection;
    }
    return x;
}

Complex evaluate_polynomial(std::span<const Complex> coefficients, Complex x) {
    Complex acc{};
    for (Complex c : coefficients) acc = acc * x + c;
    return acc;
}

ComplexVector polynomial_roots(std::span<const Complex> coefficients) {
    if (coefficients.size() < 2) throw InputError("polynomial_roots: degree must be >= 1");
    if (coefficients.front() == Complex{}) {
        throw InputError("polynomial_roots: leading coefficient must be nonzero");
    }
    if (!all_finite(coefficients)) throw InputError("polynomial_roots: coefficients must be finite");

    const std::size_t degree = coefficients.size() - 1;
    ComplexVector monic(coefficients.size());
    for (std::size_t i = 0; i < monic.size(); ++i) monic[i] = coefficients[i] / coefficients[0];

    ComplexVector roots;
    if (degree == 1) {
        roots.push_back(-monic[1]);
        return roots;
    }

    // Frobenius companion matrix: ones on the subdiagonal, first row -c.
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
    for (std::size_t c = 0; c < degree; ++c) companion(0, c) = -monic[c + 1];
    for (std::size_t r = 1; r < degree; ++r) companion(r, r - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw AlgorithmError("companion eigenvalue iteration failed");

    ComplexVector derivative(degree);
    for (std::size_t i = 0; i < degree; ++i)
        derivative[i] = monic[i] * static_cast<double>(degree - i);

    roots.reserve(degree);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        Complex x = solver.eigenvalues()(i);
        double residual = std::abs(evaluate_polynomial(monic, x));
        for (int step = 0; step < 3 && residual > 0.0; ++step) {
            const Complex slope = evaluate_polynomial(derivative, x);
            if (slope == Complex{}) break;
            const Complex next = x - evaluate_polynomial(monic, x) / slope;
            const double next_residual = std::abs(evaluate_polynomial(monic, next));
            if (!(next_residual < residual)) break;
            x = next;
            residual = next_residual;
        }
        roots.push_back(x);
    }
    return roots;
}

} // namespace gsdst
