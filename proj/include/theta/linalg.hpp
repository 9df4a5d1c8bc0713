#pragma once

// Dense real linear algebra at desk scale (n up to a few hundred).
//
// Everything here is a pure function of its arguments. Symmetric eigenproblems
// are solved with the cyclic Jacobi rotation method, which is slow for large n
// but accurate to a few ulps of ||B|| and simple to certify.

#include <cstddef>
#include <span>
#include <vector>

namespace theta::linalg {

inline constexpr double kDefaultTol = 1e-10;

using Vector = std::vector<double>;

class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    // n == 0 is allowed and encodes the form on Z^0.
    explicit SymmetricMatrix(std::size_t n, double fill = 0.0);

    // Row-major n*n entries; throws ValidationError unless entries[i][j] == entries[j][i] exactly.
    static SymmetricMatrix from_entries(std::size_t n, std::vector<double> entries);
    static SymmetricMatrix identity(std::size_t n, double scale = 1.0);
    static SymmetricMatrix diagonal(std::span<const double> diag);

    std::size_t n() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }
    // Writes both (i, j) and (j, i).
    void set(std::size_t i, std::size_t j, double value) noexcept;
    std::span<const double> entries() const noexcept { return a_; }

    SymmetricMatrix& operator+=(const SymmetricMatrix& other);
    SymmetricMatrix& operator-=(const SymmetricMatrix& other);
    SymmetricMatrix& operator*=(double scale) noexcept;

    // Leading principal submatrix of size k.
    SymmetricMatrix leading(std::size_t k) const;

    friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

SymmetricMatrix operator+(SymmetricMatrix lhs, const SymmetricMatrix& rhs);
SymmetricMatrix operator-(SymmetricMatrix lhs, const SymmetricMatrix& rhs);
SymmetricMatrix operator*(double scale, SymmetricMatrix m);

// m x n real matrix. m == 0 is allowed and encodes the zero form.
class RectMatrix {
public:
    RectMatrix() = default;
    RectMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    static RectMatrix from_entries(std::size_t rows, std::size_t cols, std::vector<double> entries);
    static RectMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const noexcept { return {a_.data() + i * cols_, cols_}; }
    std::span<const double> entries() const noexcept { return a_; }

    RectMatrix transposed() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

struct SpectralBounds {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

// Eigenvalues in ascending order; column k of `vectors` is the unit eigenvector for values[k].
struct EigenDecomposition {
    Vector values;
    RectMatrix vectors;
};

EigenDecomposition eigen_decompose(const SymmetricMatrix& b, int max_sweeps = 100);

SpectralBounds spectral_bounds(const SymmetricMatrix& b, double tol = kDefaultTol);

// a <= b in the Loewner order: lambda_min(b - a) >= -tol.
bool psd_order_leq(const SymmetricMatrix& a, const SymmetricMatrix& b, double tol = kDefaultTol);

// Returns A (rank x n) with A^T A / 2 == c. Eigenvalues below tol * (1 + lambda_max) count as zero.
RectMatrix factor_half_gram(const SymmetricMatrix& c, double tol = kDefaultTol);

// Largest singular value; 0 for an empty matrix.
double operator_norm(const RectMatrix& a, double tol = kDefaultTol);
double operator_norm(const SymmetricMatrix& a, double tol = kDefaultTol);

// Orthogonal projection onto the row space of a full-row-rank A: A^T (A A^T)^{-1} A.
SymmetricMatrix row_space_projection(const RectMatrix& a, double tol = kDefaultTol);

// A^T A and A A^T.
SymmetricMatrix gram_of_columns(const RectMatrix& a);
SymmetricMatrix gram_of_rows(const RectMatrix& a);

// Inverse and log-determinant of a positive definite matrix. Throws ValidationError when
// the matrix is not positive definite or its condition number exceeds max_condition.
struct SpdInverse {
    SymmetricMatrix inverse;
    double log_det = 0.0;
    double condition = 1.0;
};
SpdInverse spd_inverse(const SymmetricMatrix& b, double max_condition = 1e12);

Vector multiply(const SymmetricMatrix& b, std::span<const double> x);
Vector multiply(const RectMatrix& a, std::span<const double> x);
double quadratic_form(const SymmetricMatrix& b, std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double norm(std::span<const double> x);

// Solves the square system m x = rhs by Gaussian elimination with partial pivoting.
Vector solve(const RectMatrix& m, std::span<const double> rhs);

} // namespace theta::linalg
