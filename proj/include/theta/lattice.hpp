#pragma once

// Lattice applications of theta sums: integer points in ker A and short-vector detection,
// and distance intervals for lattices containing Z^n.

#include <cstdint>
#include <string_view>

#include "theta/linalg.hpp"
#include "theta/theta.hpp"

namespace theta::lattice {

struct SubspaceInstance {
    linalg::RectMatrix a_int; // m x n, integer entries, rank m < n
    double s = 0.0;
    double t = 0.0;
    double gamma_norm = 1.0; // max(1, ||A||_op)

    // Validates integrality, rank and parameters; fills gamma_norm.
    static SubspaceInstance make(linalg::RectMatrix a_int, double s, double t);
    // s = (1/2 + delta) ln n and t = e^s / 5.
    static SubspaceInstance from_delta(linalg::RectMatrix a_int, double delta);

    std::size_t n() const noexcept { return a_int.cols(); }
    std::size_t m() const noexcept { return a_int.rows(); }
};

// s I + t P, P the orthogonal projection onto the row space of A.
linalg::SymmetricMatrix subspace_form(const SubspaceInstance& inst);

// exp{-t / gamma^2 + 2 n e^-s / (1 - e^-s)}
double subspace_additive_bound(std::size_t n, double s, double t, double gamma_norm);

struct SubspaceTheta {
    core::ThetaResult theta;
    double additive_bound = 0.0;
};

// Theta of s I + t P and the additive bound on its distance from sum_{x in ker A cap Z^n} e^{-s |x|^2}.
// Requires s >= 3 and t <= e^s / 5.
SubspaceTheta subspace_theta(const SubspaceInstance& inst, double eps, std::uint64_t seed,
                             const core::ThetaOptions& options = {});

enum class Decision { no_short, many_short, inconclusive };
std::string_view to_string(Decision decision);

struct ShortVectorReport {
    Decision decision = Decision::inconclusive;
    SubspaceTheta result;
    int k = 0;              // ceil(30 n e^-s)
    double shell_bound = 0; // e^-k
    double lower = 0.0;     // confidence interval for the kernel theta
    double upper = 0.0;
};

// NO_SHORT when the lower confidence bound is at most 1 + e^-k and the upper one stays below 2,
// MANY_SHORT when the lower confidence bound reaches 2, INCONCLUSIVE otherwise.
ShortVectorReport short_vector_test(const SubspaceInstance& inst, double delta, double eps, std::uint64_t seed,
                                    const core::ThetaOptions& options = {});

// 1 / ||A||_op, a lower bound on dist(x, ker A) for integer x outside ker A.
double dist_lower_bound_subspace(const linalg::RectMatrix& a_int);

// e^-k, certified for sum_{|x|^2 >= k} e^{-s |x|^2} when 4n/e >= k >= 30 n e^-s.
double theta_tail_bound(std::size_t n, double s, int k);

struct LatticeBasis {
    linalg::RectMatrix vectors; // rows u_1..u_n
    linalg::SymmetricMatrix gram;
    double log_det = 0.0;       // ln det(Lambda) = ln sqrt(det gram)
    double det_lattice = 1.0;
    linalg::SpectralBounds bounds;

    static LatticeBasis from_rows(linalg::RectMatrix rows);
    std::size_t n() const noexcept { return vectors.rows(); }
};

// Whether every standard basis vector has integer coordinates in the basis (tolerance 1e-9).
bool contains_integer_lattice(const LatticeBasis& basis);

struct DistanceBounds {
    double d_lo = 0.0;
    double d_hi = 0.0;
    double log_ratio = 0.0; // measured ln(Theta(tau I) / Theta_Lambda(tau, v))
    double tau = 0.0;
    double log_ratio_error = 0.0;
    core::ThetaResult lattice_theta;
};

DistanceBounds distance_interval(const LatticeBasis& basis, std::span<const double> v, double tau, double eps,
                                 std::uint64_t seed, const core::ThetaOptions& options = {});

} // namespace theta::lattice
