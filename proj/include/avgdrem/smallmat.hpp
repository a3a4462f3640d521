#pragma once

// Dense kernels for the small (n <= 8) matrices that appear in regressor
// extension, mixing and the observer filters.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "avgdrem/errors.hpp"

namespace avgdrem {

using Vec = std::vector<double>;

/// Row-major dense matrix with value semantics.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat identity(std::size_t n);
    static Mat diagonal(std::span<const double> d);
    /// Builds a rows x cols matrix from row-major storage.
    static Mat from_span(std::size_t rows, std::size_t cols, std::span<const double> values);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<double> data() noexcept { return data_; }

    [[nodiscard]] Mat transposed() const;
    [[nodiscard]] bool all_finite() const noexcept;
    /// Largest absolute entry.
    [[nodiscard]] double max_abs() const noexcept;

    Mat& operator+=(const Mat& other);
    Mat& operator-=(const Mat& other);
    Mat& operator*=(double s) noexcept;

    friend bool operator==(const Mat&, const Mat&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(Mat a, double s);
Mat operator*(double s, Mat a);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, std::span<const double> x);

/// Outer product u v^T.
Mat outer(std::span<const double> u, std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);
double norm2(std::span<const double> v);

/// Determinant. Cofactor expansion up to 4x4, LU with partial pivoting above.
double det(const Mat& m);

/// Classical adjoint: adjugate(m) * m == det(m) * I, also for singular m.
Mat adjugate(const Mat& m);

/// tr(a * b) without forming the product.
double trace_prod(const Mat& a, const Mat& b);

/// Solves a x = b by LU with partial pivoting. Throws SolverError when a is
/// numerically singular.
Vec solve(const Mat& a, std::span<const double> b);

/// Eigenvalues of a symmetric matrix in ascending order.
Vec symmetric_eigenvalues(const Mat& m);

/// Spectral norm (largest singular value).
double spectral_norm(const Mat& m);

/// Solves a_k^T P + P a_k = -q for symmetric positive-definite P.
/// Throws SolverError when a_k is not Hurwitz (singular Kronecker system,
/// non-positive-definite solution or large residual).
Mat solve_lyapunov(const Mat& a_k, const Mat& q);

}  // namespace avgdrem
