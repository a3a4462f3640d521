#include "avgdrem/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace avgdrem {

namespace {

void require_square(const Mat& m, const char* what) {
    if (!m.square()) {
        throw DimensionError(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", expected square");
    }
}

void require_same_shape(const Mat& a, const Mat& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

double det2(const Mat& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

double det3(const Mat& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

Mat minor_of(const Mat& m, std::size_t skip_row, std::size_t skip_col) {
    const std::size_t n = m.rows();
    Mat out(n - 1, n - 1);
    for (std::size_t i = 0, r = 0; i < n; ++i) {
        if (i == skip_row) continue;
        for (std::size_t j = 0, c = 0; j < n; ++j) {
            if (j == skip_col) continue;
            out(r, c++) = m(i, j);
        }
        ++r;
    }
    return out;
}

double det4(const Mat& m) {
    double acc = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        acc += sign * m(0, j) * det3(minor_of(m, 0, j));
    }
    return acc;
}

struct LuFactors {
    Mat lu;
    std::vector<std::size_t> perm;
    int sign = 1;
    bool singular = false;
};

LuFactors lu_factor(const Mat& m) {
    const std::size_t n = m.rows();
    LuFactors f{m, std::vector<std::size_t>(n), 1, false};
    std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
    Mat& a = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        }
        if (a(piv, k) == 0.0) {
            f.singular = true;
            continue;
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
            f.sign = -f.sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double factor = a(i, k) / a(k, k);
            a(i, k) = factor;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= factor * a(k, j);
        }
    }
    return f;
}

double det_lu(const Mat& m) {
    const LuFactors f = lu_factor(m);
    if (f.singular) return 0.0;
    double d = f.sign;
    for (std::size_t i = 0; i < m.rows(); ++i) d *= f.lu(i, i);
    return d;
}

Eigen::MatrixXd to_eigen(const Mat& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

}  // namespace

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("Mat: ragged initializer list");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diagonal(std::span<const double> d) {
    Mat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Mat Mat::from_span(std::size_t rows, std::size_t cols, std::span<const double> values) {
    if (values.size() != rows * cols) throw DimensionError("Mat::from_span: size mismatch");
    Mat m(rows, cols);
    std::copy(values.begin(), values.end(), m.data_.begin());
    return m;
}

Mat Mat::transposed() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool Mat::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Mat::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Mat& Mat::operator+=(const Mat& other) {
    require_same_shape(*this, other, "Mat::operator+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Mat& Mat::operator-=(const Mat& other) {
    require_same_shape(*this, other, "Mat::operator-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Mat& Mat::operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(Mat a, double s) { return a *= s; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw DimensionError("Mat product: inner dimensions differ");
    Mat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vec operator*(const Mat& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DimensionError("Mat-vector product: dimension mismatch");
    Vec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

Mat outer(std::span<const double> u, std::span<const double> v) {
    Mat m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec operator+(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("vector sum: length mismatch");
    Vec c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
    return c;
}

Vec operator-(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("vector difference: length mismatch");
    Vec c(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
    return c;
}

Vec operator*(double s, const Vec& a) {
    Vec c(a);
    for (double& v : c) v *= s;
    return c;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double det(const Mat& m) {
    require_square(m, "det");
    switch (m.rows()) {
        case 0: return 1.0;
        case 1: return m(0, 0);
        case 2: return det2(m);
        case 3: return det3(m);
        case 4: return det4(m);
        default: return det_lu(m);
    }
}

Mat adjugate(const Mat& m) {
    require_square(m, "adjugate");
    const std::size_t n = m.rows();
    if (n == 0) return m;
    if (n == 1) return Mat::identity(1);
    if (n == 2) return Mat{{m(1, 1), -m(0, 1)}, {-m(1, 0), m(0, 0)}};
    Mat adj(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            adj(j, i) = sign * det(minor_of(m, i, j));
        }
    return adj;
}

double trace_prod(const Mat& a, const Mat& b) {
    require_square(a, "trace_prod");
    require_same_shape(a, b, "trace_prod");
    const std::size_t n = a.rows();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, i);
    return s;
}

Vec solve(const Mat& a, std::span<const double> b) {
    require_square(a, "solve");
    if (b.size() != a.rows()) throw DimensionError("solve: right-hand side length mismatch");
    const std::size_t n = a.rows();
    const LuFactors f = lu_factor(a);
    const double scale = std::max(a.max_abs(), 1e-300);
    for (std::size_t i = 0; i < n; ++i) {
        if (f.singular || std::abs(f.lu(i, i)) <= 1e-14 * scale) {
            throw SolverError("solve: matrix is numerically singular");
        }
    }
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[f.perm[i]];
        for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
        x[i] = s / f.lu(i, i);
    }
    return x;
}

Vec symmetric_eigenvalues(const Mat& m) {
    require_square(m, "symmetric_eigenvalues");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw SolverError("symmetric_eigenvalues: no convergence");
    const auto& ev = solver.eigenvalues();
    return Vec(ev.data(), ev.data() + ev.size());
}

double spectral_norm(const Mat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    const Vec ev = symmetric_eigenvalues(m.transposed() * m);
    return std::sqrt(std::max(ev.back(), 0.0));
}

Mat solve_lyapunov(const Mat& a_k, const Mat& q) {
    require_square(a_k, "solve_lyapunov");
    require_same_shape(a_k, q, "solve_lyapunov");
    const std::size_t n = a_k.rows();
    const std::size_t nn = n * n;
    if ((q - q.transposed()).max_abs() > 1e-12 * std::max(1.0, q.max_abs())) {
        throw ParameterError("solve_lyapunov: q must be symmetric");
    }

    // Column-major vec: vec(A^T P) = (I kron A^T) vec P, vec(P A) = (A^T kron I) vec P.
    Mat kron(nn, nn);
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t row = col * n + i;
            for (std::size_t k = 0; k < n; ++k) {
                kron(row, col * n + k) += a_k(k, i);
                kron(row, k * n + i) += a_k(k, col);
            }
        }
    }
    Vec rhs(nn);
    for (std::size_t col = 0; col < n; ++col)
        for (std::size_t i = 0; i < n; ++i) rhs[col * n + i] = -q(i, col);

    Vec vec_p;
    try {
        vec_p = solve(kron, rhs);
    } catch (const SolverError&) {
        throw SolverError("solve_lyapunov: Kronecker system singular, A_K has eigenvalues summing to zero");
    }

    Mat p(n, n);
    for (std::size_t col = 0; col < n; ++col)
        for (std::size_t i = 0; i < n; ++i) p(i, col) = vec_p[col * n + i];
    p = 0.5 * (p + p.transposed());

    const Mat residual = a_k.transposed() * p + p * a_k + q;
    const double scale = std::max({1.0, q.max_abs(), p.max_abs() * a_k.max_abs()});
    if (!p.all_finite() || residual.max_abs() > 1e-9 * scale) {
        throw SolverError("solve_lyapunov: residual check failed");
    }
    if (symmetric_eigenvalues(p).front() <= 0.0) {
        throw SolverError("solve_lyapunov: solution is not positive definite, A_K is not Hurwitz");
    }
    return p;
}

}  // namespace avgdrem
