#pragma once

// One-dimensional Jacobi triple product machinery.
//
//   prod_{k>=1} (1 - q^{2k}) (1 + w q^{2k-1}) (1 + w^{-1} q^{2k-1}) = sum_{xi in Z} w^xi q^{xi^2}
//
// With w = e^{i theta} the paired factors become 1 + 2 q^{2k-1} cos(theta) + q^{4k-2}.

namespace theta::jacobi {

// q = e^{-s}, 0 < q < 1.
struct NomeParams {
    double s;
    double q;

    static NomeParams from_s(double s);
};

struct TruncationOrder {
    int K;
};

// prod_{k=1..K} (1 - q^{2k}) (1 + 2 q^{2k-1} cos(angle) + q^{4k-2}); requires 0 <= q < 1.
double triple_product_lhs(double q, double angle, TruncationOrder order);

// sum_{|xi| <= terms} q^{xi^2} cos(xi * angle), the series side of the identity.
double triple_product_series(double q, double angle, int terms);

// sum_{xi in Z} e^{-s xi^2} by symmetric truncation at |xi| <= tail_terms.
double theta_1d(double s, int tail_terms);
// Same, with tail_terms chosen so the omitted mass is below 1e-17 of the result.
double theta_1d(double s);

// sum_{xi in Z} e^{-s (xi - shift)^2}, summed around the nearest integer to shift.
double theta_1d_shifted(double s, double shift);

// Smallest K >= 1 with 5 n q^{2K-1} <= eps/3 and 4 n q^{2K} <= eps/3, q = e^{-s}.
TruncationOrder truncation_order(int n, double eps, double s);

// Certified bound on |log(truncated product) - log(infinite product)| over all n factors:
// n * ( -2 sum_{k>K} ln(1 - q^{2k-1}) - sum_{k>K} ln(1 - q^{2k}) ).
double truncation_log_error(int n, double q, TruncationOrder order);

} // namespace theta::jacobi
