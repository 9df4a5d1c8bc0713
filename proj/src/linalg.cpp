#include "theta/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "theta/errors.hpp"

namespace theta::linalg {

SymmetricMatrix::SymmetricMatrix(std::size_t n, double fill) : n_(n), a_(n * n, fill) {}

SymmetricMatrix SymmetricMatrix::from_entries(std::size_t n, std::vector<double> entries)
{
    if (n == 0) throw ValidationError("symmetric matrix dimension must be at least 1");
    if (entries.size() != n * n)
        throw ValidationError("symmetric matrix expects " + std::to_string(n * n) + " entries, got " +
                              std::to_string(entries.size()));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = entries[i * n + j];
            if (!std::isfinite(v)) throw ValidationError("symmetric matrix has a non-finite entry");
            if (v != entries[j * n + i])
                throw ValidationError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                                      std::to_string(j) + ")");
        }
    }
    SymmetricMatrix m;
    m.n_ = n;
    m.a_ = std::move(entries);
    return m;
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t n, double scale)
{
    SymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.a_[i * n + i] = scale;
    return m;
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> diag)
{
    SymmetricMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m.a_[i * diag.size() + i] = diag[i];
    return m;
}

void SymmetricMatrix::set(std::size_t i, std::size_t j, double value) noexcept
{
    a_[i * n_ + j] = value;
    a_[j * n_ + i] = value;
}

SymmetricMatrix& SymmetricMatrix::operator+=(const SymmetricMatrix& other)
{
    if (other.n_ != n_) throw ValidationError("dimension mismatch in matrix addition");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
    return *this;
}

SymmetricMatrix& SymmetricMatrix::operator-=(const SymmetricMatrix& other)
{
    if (other.n_ != n_) throw ValidationError("dimension mismatch in matrix subtraction");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= other.a_[i];
    return *this;
}

SymmetricMatrix& SymmetricMatrix::operator*=(double scale) noexcept
{
    for (double& v : a_) v *= scale;
    return *this;
}

SymmetricMatrix SymmetricMatrix::leading(std::size_t k) const
{
    SymmetricMatrix m(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m.a_[i * k + j] = a_[i * n_ + j];
    return m;
}

SymmetricMatrix operator+(SymmetricMatrix lhs, const SymmetricMatrix& rhs) { return lhs += rhs; }
SymmetricMatrix operator-(SymmetricMatrix lhs, const SymmetricMatrix& rhs) { return lhs -= rhs; }
SymmetricMatrix operator*(double scale, SymmetricMatrix m) { return m *= scale; }

RectMatrix::RectMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), a_(rows * cols, fill)
{
    if (cols == 0) throw ValidationError("rectangular matrix needs at least one column");
}

RectMatrix RectMatrix::from_entries(std::size_t rows, std::size_t cols, std::vector<double> entries)
{
    if (cols == 0) throw ValidationError("rectangular matrix needs at least one column");
    if (entries.size() != rows * cols)
        throw ValidationError("rectangular matrix expects " + std::to_string(rows * cols) + " entries, got " +
                              std::to_string(entries.size()));
    for (double v : entries)
        if (!std::isfinite(v)) throw ValidationError("rectangular matrix has a non-finite entry");
    RectMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.a_ = std::move(entries);
    return m;
}

RectMatrix RectMatrix::from_rows(const std::vector<std::vector<double>>& rows)
{
    if (rows.empty()) throw ValidationError("from_rows needs at least one row to fix the column count");
    const std::size_t cols = rows.front().size();
    std::vector<double> entries;
    entries.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw ValidationError("ragged rows in matrix input");
        entries.insert(entries.end(), r.begin(), r.end());
    }
    return from_entries(rows.size(), cols, std::move(entries));
}

RectMatrix RectMatrix::transposed() const
{
    if (rows_ == 0) throw ValidationError("cannot transpose an empty matrix");
    RectMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

EigenDecomposition eigen_decompose(const SymmetricMatrix& b, int max_sweeps)
{
    const std::size_t n = b.n();
    std::vector<double> a(b.entries().begin(), b.entries().end());
    RectMatrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));

    bool converged = scale == 0.0 || n == 1;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (std::sqrt(off) <= 1e-300 || std::sqrt(off) <= 4e-17 * scale) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double app = at(p, p);
                const double aqq = at(q, q);
                // Skip rotations that cannot change the diagonal in floating point.
                if (sweep > 3 && std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq))) {
                    at(p, q) = at(q, p) = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                at(p, q) = at(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (std::sqrt(off) > 1e-14 * scale)
            throw ConvergenceError("Jacobi eigensolver did not converge within " + std::to_string(max_sweeps) +
                                   " sweeps");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return at(i, i) < at(j, j); });

    EigenDecomposition out{Vector(n), RectMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = at(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

SpectralBounds spectral_bounds(const SymmetricMatrix& b, double tol)
{
    if (!(tol > 0.0)) throw ValidationError("spectral_bounds: tol must be positive");
    const auto eig = eigen_decompose(b);
    return {eig.values.front(), eig.values.back()};
}

bool psd_order_leq(const SymmetricMatrix& a, const SymmetricMatrix& b, double tol)
{
    if (a.n() != b.n()) throw ValidationError("psd_order_leq: dimension mismatch");
    return spectral_bounds(b - a, tol).lambda_min >= -tol;
}

RectMatrix factor_half_gram(const SymmetricMatrix& c, double tol)
{
    const std::size_t n = c.n();
    const auto eig = eigen_decompose(c);
    const double top = std::max(0.0, eig.values.back());
    const double cut = tol * (1.0 + top);
    if (eig.values.front() < -cut)
        throw ValidationError("factor_half_gram: matrix is not positive semidefinite (eigenvalue " +
                              std::to_string(eig.values.front()) + ")");

    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < n; ++k)
        if (eig.values[k] > cut) kept.push_back(k);

    RectMatrix a(kept.size(), n);
    for (std::size_t r = 0; r < kept.size(); ++r) {
        const std::size_t k = kept[r];
        const double w = std::sqrt(2.0 * eig.values[k]);
        for (std::size_t j = 0; j < n; ++j) a(r, j) = w * eig.vectors(j, k);
    }
    return a;
}

SymmetricMatrix gram_of_columns(const RectMatrix& a)
{
    const std::size_t n = a.cols();
    SymmetricMatrix g(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, i) * a(r, j);
            g.set(i, j, s);
        }
    }
    return g;
}

SymmetricMatrix gram_of_rows(const RectMatrix& a)
{
    const std::size_t m = a.rows();
    if (m == 0) throw ValidationError("gram_of_rows: empty matrix");
    SymmetricMatrix g(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) g.set(i, j, dot(a.row(i), a.row(j)));
    return g;
}

double operator_norm(const RectMatrix& a, double tol)
{
    if (!(tol > 0.0)) throw ValidationError("operator_norm: tol must be positive");
    if (a.rows() == 0) return 0.0;
    const SymmetricMatrix g = a.rows() <= a.cols() ? gram_of_rows(a) : gram_of_columns(a);
    return std::sqrt(std::max(0.0, spectral_bounds(g, tol).lambda_max));
}

double operator_norm(const SymmetricMatrix& a, double tol)
{
    const auto bounds = spectral_bounds(a, tol);
    return std::max(std::abs(bounds.lambda_min), std::abs(bounds.lambda_max));
}

SymmetricMatrix row_space_projection(const RectMatrix& a, double tol)
{
    if (a.rows() == 0) throw ValidationError("row_space_projection: need at least one row");
    const SymmetricMatrix g = gram_of_rows(a);
    const auto eig = eigen_decompose(g);
    if (eig.values.front() <= tol * (1.0 + eig.values.back()))
        throw ValidationError("row_space_projection: rows are numerically dependent (A A^T is singular)");

    // (A A^T)^{-1} A, then P = A^T * that.
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    RectMatrix w(m, n);
    for (std::size_t k = 0; k < m; ++k) {
        // component of A along eigenvector k, scaled by 1/lambda_k
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < m; ++r) s += eig.vectors(r, k) * a(r, j);
            w(k, j) = s / std::sqrt(eig.values[k]);
        }
    }
    return gram_of_columns(w);
}

SpdInverse spd_inverse(const SymmetricMatrix& b, double max_condition)
{
    const std::size_t n = b.n();
    const auto eig = eigen_decompose(b);
    if (!(eig.values.front() > 0.0)) throw ValidationError("matrix is not positive definite");
    const double condition = eig.values.back() / eig.values.front();
    if (condition > max_condition)
        throw ValidationError("matrix is ill-conditioned for inversion (condition estimate " +
                              std::to_string(condition) + ")");
    SpdInverse out{SymmetricMatrix(n), 0.0, condition};
    for (double lambda : eig.values) out.log_det += std::log(lambda);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += eig.vectors(i, k) * eig.vectors(j, k) / eig.values[k];
            out.inverse.set(i, j, s);
        }
    }
    return out;
}

Vector multiply(const SymmetricMatrix& b, std::span<const double> x)
{
    const std::size_t n = b.n();
    if (x.size() != n) throw ValidationError("multiply: dimension mismatch");
    Vector y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += b(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Vector multiply(const RectMatrix& a, std::span<const double> x)
{
    if (x.size() != a.cols()) throw ValidationError("multiply: dimension mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

double quadratic_form(const SymmetricMatrix& b, std::span<const double> x)
{
    return dot(multiply(b, x), x);
}

double dot(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw ValidationError("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

Vector solve(const RectMatrix& m, std::span<const double> rhs)
{
    const std::size_t n = m.rows();
    if (m.cols() != n || rhs.size() != n) throw ValidationError("solve: expects a square system");
    RectMatrix a = m;
    Vector x(rhs.begin(), rhs.end());
    double scale = 0.0;
    for (double v : m.entries()) scale = std::max(scale, std::abs(v));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (std::abs(a(pivot, col)) <= 1e-14 * scale) throw ValidationError("solve: matrix is singular");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
            std::swap(x[pivot], x[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            x[r] -= f * x[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

} // namespace theta::linalg
