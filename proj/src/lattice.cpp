#include "theta/lattice.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "theta/errors.hpp"
#include "theta/jacobi.hpp"

namespace theta::lattice {

namespace {

void check_integer_matrix(const linalg::RectMatrix& a)
{
    for (double x : a.entries())
        if (!std::isfinite(x) || std::round(x) != x) throw ValidationError("A must have integer entries");
}

} // namespace

SubspaceInstance SubspaceInstance::make(linalg::RectMatrix a_int, double s, double t)
{
    if (a_int.rows() == 0) throw ValidationError("A must have at least one row");
    if (a_int.rows() >= a_int.cols())
        throw ValidationError("A must have fewer rows than columns (m = " + std::to_string(a_int.rows()) +
                              ", n = " + std::to_string(a_int.cols()) + ")");
    check_integer_matrix(a_int);
    if (!(s > 0.0) || !(t > 0.0)) throw ValidationError("s and t must be positive");
    // Throws on rank deficiency.
    (void)linalg::row_space_projection(a_int);
    const double gamma = std::max(1.0, linalg::operator_norm(a_int));
    return SubspaceInstance{std::move(a_int), s, t, gamma};
}

SubspaceInstance SubspaceInstance::from_delta(linalg::RectMatrix a_int, double delta)
{
    if (!(delta > -0.5)) throw ValidationError("delta must exceed -1/2");
    const double s = (0.5 + delta) * std::log(double(a_int.cols()));
    return make(std::move(a_int), s, std::exp(s) / 5.0);
}

linalg::SymmetricMatrix subspace_form(const SubspaceInstance& inst)
{
    auto form = inst.t * linalg::row_space_projection(inst.a_int);
    form += linalg::SymmetricMatrix::identity(inst.n(), inst.s);
    return form;
}

double subspace_additive_bound(std::size_t n, double s, double t, double gamma_norm)
{
    const double q = std::exp(-s);
    return std::exp(-t / (gamma_norm * gamma_norm) + 2.0 * double(n) * q / (1.0 - q));
}

SubspaceTheta subspace_theta(const SubspaceInstance& inst, double eps, std::uint64_t seed,
                             const core::ThetaOptions& options)
{
    if (inst.s < 3.0) throw RegimeError("subspace theta needs s >= 3 (s = " + std::to_string(inst.s) + ")");
    const double t_max = std::exp(inst.s) / 5.0;
    if (inst.t > t_max * (1.0 + 1e-12))
        throw RegimeError("subspace theta needs t <= e^s / 5 = " + std::to_string(t_max) +
                          " (t = " + std::to_string(inst.t) + ")");
    auto theta_inst = core::make_sum_instance(subspace_form(inst), linalg::Vector(inst.n(), 0.0), eps, seed);
    SubspaceTheta out;
    out.theta = core::theta_sum(theta_inst, options);
    out.additive_bound = subspace_additive_bound(inst.n(), inst.s, inst.t, inst.gamma_norm);
    return out;
}

std::string_view to_string(Decision decision)
{
    switch (decision) {
    case Decision::no_short: return "NO_SHORT";
    case Decision::many_short: return "MANY_SHORT";
    case Decision::inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

ShortVectorReport short_vector_test(const SubspaceInstance& inst, double delta, double eps, std::uint64_t seed,
                                    const core::ThetaOptions& options)
{
    const double n = double(inst.n());
    const double expected_s = (0.5 + delta) * std::log(n);
    if (std::abs(inst.s - expected_s) > 1e-9 * (1.0 + expected_s))
        throw ValidationError("short-vector test needs s = (1/2 + delta) ln n = " + std::to_string(expected_s));
    ShortVectorReport out;
    out.k = static_cast<int>(std::ceil(30.0 * n * std::exp(-inst.s)));
    if (4.0 * n / std::numbers::e < out.k)
        throw ValidationError("short-vector test needs 4n/e >= k = ceil(30 n e^-s) (k = " + std::to_string(out.k) + ")");
    out.shell_bound = theta_tail_bound(inst.n(), inst.s, out.k);
    out.result = subspace_theta(inst, eps, seed, options);

    const double value = out.result.theta.estimate.value;
    const double half_width = value * out.result.theta.combined_rel_error(options.conf) + out.result.additive_bound;
    out.lower = value - half_width;
    out.upper = value + half_width;
    if (out.lower >= 2.0)
        out.decision = Decision::many_short;
    else if (out.lower <= 1.0 + out.shell_bound && out.upper < 2.0)
        out.decision = Decision::no_short;
    else
        out.decision = Decision::inconclusive;
    return out;
}

double dist_lower_bound_subspace(const linalg::RectMatrix& a_int)
{
    check_integer_matrix(a_int);
    const double norm = linalg::operator_norm(a_int);
    if (!(norm > 0.0)) throw ValidationError("A must be nonzero");
    return 1.0 / norm;
}

double theta_tail_bound(std::size_t n, double s, int k)
{
    const double nd = double(n);
    if (k > 4.0 * nd / std::numbers::e || k < 30.0 * nd * std::exp(-s))
        throw ValidationError("shell tail bound needs 4n/e >= k >= 30 n e^-s (n = " + std::to_string(n) +
                              ", s = " + std::to_string(s) + ", k = " + std::to_string(k) + ")");
    return std::exp(-double(k));
}

LatticeBasis LatticeBasis::from_rows(linalg::RectMatrix rows)
{
    if (rows.rows() == 0 || rows.rows() != rows.cols())
        throw ValidationError("a lattice basis needs n vectors in R^n");
    for (double x : rows.entries())
        if (!std::isfinite(x)) throw ValidationError("basis contains a non-finite entry");
    LatticeBasis out;
    out.gram = linalg::gram_of_rows(rows);
    out.vectors = std::move(rows);
    const auto eig = linalg::eigen_decompose(out.gram);
    if (!(eig.values.front() > linalg::kDefaultTol * (1.0 + eig.values.back())))
        throw ValidationError("basis vectors are linearly dependent");
    out.bounds = {eig.values.front(), eig.values.back()};
    for (double lambda : eig.values) out.log_det += 0.5 * std::log(lambda);
    out.det_lattice = std::exp(out.log_det);
    return out;
}

bool contains_integer_lattice(const LatticeBasis& basis)
{
    const std::size_t n = basis.n();
    const auto transposed = basis.vectors.transposed();
    for (std::size_t j = 0; j < n; ++j) {
        linalg::Vector e(n, 0.0);
        e[j] = 1.0;
        for (double c : linalg::solve(transposed, e))
            if (std::abs(c - std::round(c)) > 1e-9) return false;
    }
    return true;
}

DistanceBounds distance_interval(const LatticeBasis& basis, std::span<const double> v, double tau, double eps,
                                 std::uint64_t seed, const core::ThetaOptions& options)
{
    const std::size_t n = basis.n();
    if (v.size() != n) throw ValidationError("target point has the wrong dimension");
    if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("tau must lie in (0, 1]");
    if (!contains_integer_lattice(basis)) throw ValidationError("the lattice does not contain Z^n");

    const double log_theta_integer = double(n) * std::log(jacobi::theta_1d(tau));
    auto coords = linalg::solve(basis.vectors.transposed(), v);
    auto inst = core::make_shifted_instance(tau * basis.gram, std::move(coords), eps, seed);

    DistanceBounds out;
    out.tau = tau;
    out.lattice_theta = core::evaluate(inst, options);
    out.log_ratio = log_theta_integer - out.lattice_theta.estimate.log_value;
    const double rel = std::min(out.lattice_theta.combined_rel_error(options.conf), 0.5);
    out.log_ratio_error = -std::log1p(-rel);

    const double q = std::exp(-std::numbers::pi * std::numbers::pi / tau);
    const double r_lo = out.log_ratio - out.log_ratio_error;
    const double r_hi = out.log_ratio + out.log_ratio_error;
    out.d_lo = std::sqrt(std::max(0.0, r_lo) / (41.0 * q));
    out.d_hi = std::sqrt(std::max(0.0, r_hi - basis.log_det) / (13.0 * q));
    return out;
}

} // namespace theta::lattice
