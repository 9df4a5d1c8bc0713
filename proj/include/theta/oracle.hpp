#pragma once

// Brute-force ground truth at desk scale: integer points in balls, truncated theta sums with
// certified tails, exact lattice distances and exact discrete Gaussian laws.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "theta/linalg.hpp"

namespace theta::oracle {

struct OracleCaps {
    std::size_t max_points = 10'000'000;              // materialised enumerations
    std::uint64_t max_streamed_points = 2'000'000'000; // streamed theta sums
    std::size_t max_distance_dim = 6;
    std::size_t max_gaussian_dim = 4;
};

using IntPoint = std::vector<long long>;

struct BallEnumeration {
    std::size_t n = 0;
    int k = 0;
    std::vector<IntPoint> points; // lexicographic order
};

// {x in Z^n : |x|^2 <= k}.
BallEnumeration enumerate_ball(std::size_t n, int k, const OracleCaps& caps = {});

// Exact |{x in Z^n : |x|^2 <= k}| (as a double; exact below 2^53).
double ball_count(std::size_t n, int k);

// k * ln(2n + 2), the log of the point-count bound.
double ball_count_log_bound(std::size_t n, int k);

struct BruteThetaResult {
    double value = 0.0;
    double tail_bound = 0.0; // |true sum - value| <= tail_bound
    std::uint64_t points = 0;
    int k = 0;
};

// sum_{|x|^2 <= k} exp(-<Bx,x>) cos<b,x>, plus a certified bound on the omitted terms.
// Requires s_tail > 0 and s_tail I <= B.
BruteThetaResult brute_theta(const linalg::SymmetricMatrix& b, std::span<const double> phases, double s_tail, int k,
                             const OracleCaps& caps = {});

// sum_{|x - c|^2 <= k} exp(-<B(x-y),x-y>), c = round(y), plus a certified tail bound.
BruteThetaResult brute_theta_shifted(const linalg::SymmetricMatrix& b, std::span<const double> y, double s_tail,
                                     int k, const OracleCaps& caps = {});

// Grows k until tail_bound <= rel_tol * |value| (throws CapError when the enumeration would exceed caps).
BruteThetaResult brute_theta_auto(const linalg::SymmetricMatrix& b, std::span<const double> phases, double rel_tol,
                                  const OracleCaps& caps = {});
BruteThetaResult brute_theta_shifted_auto(const linalg::SymmetricMatrix& b, std::span<const double> y,
                                          double rel_tol, const OracleCaps& caps = {});

// Certified bound on sum_{w in Z^n, |w|^2 >= k} exp(-s |w - delta|^2), optimised over the
// exponential tilt tau in (0, s): e^{-tau k} prod_i sum_xi exp(-s (xi - delta_i)^2 + tau xi^2).
double tilted_tail_bound(double s, int k, std::span<const double> delta);

// Theta of the integer points in ker A: sum_{x in Z^n, Ax = 0, |x|^2 <= k} e^{-s |x|^2}, with tail.
BruteThetaResult brute_kernel_theta(const linalg::RectMatrix& a_int, double s, int k, const OracleCaps& caps = {});

// min_{x in Z^n} |sum_i x_i u_i - v| for the basis given as rows of `basis`.
double brute_distance(const linalg::RectMatrix& basis, std::span<const double> v, const OracleCaps& caps = {});

struct GaussianTable {
    std::vector<IntPoint> points; // basis coordinates
    std::vector<double> probabilities;

    double probability_of(std::span<const long long> point) const;
};

// P(x) proportional to exp(-|sum x_i u_i - v|^2) on the box floor(eta_i) - l <= x_i <= ceil(eta_i) + l, normalised.
GaussianTable brute_gaussian_distribution(const linalg::RectMatrix& basis, std::span<const double> v, int l,
                                          const OracleCaps& caps = {});

// Coordinates eta of v in the basis (v = sum eta_i u_i).
linalg::Vector basis_coordinates(const linalg::RectMatrix& basis, std::span<const double> v);

} // namespace theta::oracle
