#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "theta/errors.hpp"
#include "theta/jacobi.hpp"
#include "theta/lattice.hpp"
#include "theta/oracle.hpp"

using namespace theta;
using namespace theta::lattice;
using linalg::RectMatrix;
using linalg::SymmetricMatrix;

namespace {

constexpr double kPiSq = std::numbers::pi * std::numbers::pi;

// Rows e_i - e_{i+1}; the kernel is Z (1, ..., 1).
RectMatrix path_differences(std::size_t n)
{
    RectMatrix a(n - 1, n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        a(i, i) = 1.0;
        a(i, i + 1) = -1.0;
    }
    return a;
}

// Rows e_{first}, ..., e_{n-1}; the kernel is the span of the first coordinates.
RectMatrix coordinate_rows(std::size_t n, std::size_t first)
{
    RectMatrix a(n - first, n);
    for (std::size_t i = first; i < n; ++i) a(i - first, i) = 1.0;
    return a;
}

// Rows e_i / lambda_i with lambda_i in {1, 2}, mixed by a unimodular matrix.
LatticeBasis refined_lattice(std::mt19937_64& rng, std::size_t n, bool mix)
{
    std::uniform_int_distribution<int> coin(0, 2);
    std::uniform_int_distribution<int> small(-1, 1);
    RectMatrix rows(n, n);
    for (std::size_t i = 0; i < n; ++i) rows(i, i) = coin(rng) == 0 ? 0.5 : 1.0;
    if (mix)
        for (std::size_t i = 1; i < n; ++i) {
            const int c = small(rng);
            for (std::size_t j = 0; j < n; ++j) rows(i, j) += c * rows(i - 1, j);
        }
    return LatticeBasis::from_rows(rows);
}

} // namespace

TEST(SubspaceInstanceTest, Validation)
{
    EXPECT_THROW(SubspaceInstance::make(RectMatrix::from_rows({{0.5, 1, 0}}), 3, 1), ValidationError);
    EXPECT_THROW(SubspaceInstance::make(RectMatrix::from_rows({{1, 0}, {0, 1}}), 3, 1), ValidationError);
    EXPECT_THROW(SubspaceInstance::make(RectMatrix::from_rows({{1, 1, 0}, {2, 2, 0}}), 3, 1), ValidationError);
    EXPECT_THROW(SubspaceInstance::make(RectMatrix::from_rows({{1, 0, 0}}), 0, 1), ValidationError);

    const auto clamped = SubspaceInstance::make(RectMatrix::from_rows({{0, 0, 1}}), 3, 1);
    EXPECT_DOUBLE_EQ(clamped.gamma_norm, 1.0);
    const auto wide = SubspaceInstance::make(RectMatrix::from_rows({{3, 4, 0}}), 3, 1);
    EXPECT_NEAR(wide.gamma_norm, 5.0, 1e-12);

    const auto inst = SubspaceInstance::from_delta(path_differences(12), 1.5);
    EXPECT_NEAR(inst.s, 2.0 * std::log(12.0), 1e-12);
    EXPECT_NEAR(inst.t, std::exp(inst.s) / 5.0, 1e-12);
}

TEST(SubspaceFormTest, SpectrumIsSAndSPlusT)
{
    const auto inst = SubspaceInstance::make(path_differences(5), 3.0, 2.0);
    const auto eig = linalg::eigen_decompose(subspace_form(inst));
    EXPECT_NEAR(eig.values.front(), 3.0, 1e-12);
    EXPECT_NEAR(eig.values[1], 5.0, 1e-12);
    EXPECT_NEAR(eig.values.back(), 5.0, 1e-12);
}

TEST(SubspaceThetaTest, AdditiveBoundExample)
{
    const double s = 0.75 * std::log(100.0);
    const double bound = subspace_additive_bound(100, s, std::exp(s) / 5.0, 1.0);
    EXPECT_NEAR(std::exp(s) / 5.0, 6.33, 0.01);
    EXPECT_GT(bound, 1.0);
}

TEST(SubspaceThetaTest, CoordinateHyperplane)
{
    const std::size_t n = 4;
    const auto inst = SubspaceInstance::make(coordinate_rows(n, n - 1), 3.0, std::exp(3.0) / 5.0);
    const auto r = subspace_theta(inst, 0.02, 1);
    const double kernel = std::pow(jacobi::theta_1d(3.0), double(n - 1));
    const double value = r.theta.estimate.value;
    EXPECT_NEAR(value, kernel, r.theta.combined_rel_error(0.95) * value + r.additive_bound);
}

TEST(SubspaceThetaTest, DiagonalLineKernel)
{
    const std::size_t n = 4;
    const auto inst = SubspaceInstance::make(path_differences(n), 3.0, std::exp(3.0) / 5.0);
    const auto r = subspace_theta(inst, 0.02, 2);
    const auto kernel = oracle::brute_kernel_theta(inst.a_int, 3.0, 40);
    EXPECT_NEAR(kernel.value, jacobi::theta_1d(3.0 * n), kernel.tail_bound + 1e-15);
    const double value = r.theta.estimate.value;
    EXPECT_NEAR(value, kernel.value, r.theta.combined_rel_error(0.95) * value + r.additive_bound + kernel.tail_bound);
}

TEST(SubspaceThetaTest, RegimeGates)
{
    EXPECT_THROW(subspace_theta(SubspaceInstance::make(coordinate_rows(4, 3), 2.5, 1.0), 0.1, 0), RegimeError);
    EXPECT_THROW(subspace_theta(SubspaceInstance::make(coordinate_rows(4, 3), 3.0, std::exp(3.0) / 4.0), 0.1, 0),
                 RegimeError);
}

TEST(ShortVectorTest, NoShortVectors)
{
    // ker A = Z (1, ..., 1), whose nonzero vectors have squared norm >= 12 > k
    const double delta = 1.5;
    const auto inst = SubspaceInstance::from_delta(path_differences(12), delta);
    const auto report = short_vector_test(inst, delta, 0.05, 3);
    EXPECT_EQ(report.k, 3);
    EXPECT_DOUBLE_EQ(report.shell_bound, std::exp(-3.0));
    EXPECT_EQ(report.decision, Decision::no_short) << report.lower << " " << report.upper;
    EXPECT_LE(report.lower, 1.0 + report.shell_bound);
    EXPECT_LT(report.upper, 2.0);
}

TEST(ShortVectorTest, ManyShortVectorsInCoordinateKernel)
{
    // ker A = the first 90 coordinates of Z^100
    const double delta = 0.4;
    const std::size_t n = 100, dim = 90;
    const auto inst = SubspaceInstance::from_delta(coordinate_rows(n, dim), delta);
    const auto report = short_vector_test(inst, delta, 0.05, 4);
    EXPECT_EQ(report.k, 48);
    EXPECT_EQ(report.decision, Decision::many_short) << report.lower << " " << report.upper;
    const double kernel = std::pow(jacobi::theta_1d(inst.s), double(dim));
    EXPECT_GE(kernel, std::pow(1.0 + 2.0 * std::exp(-inst.s), double(dim)));
    EXPECT_LE(report.lower, kernel);
    EXPECT_GE(report.upper, kernel);
}

TEST(ShortVectorTest, BorderlineIsInconclusive)
{
    // kernel theta of 13 free coordinates at s = 0.9 ln 100 is about 1.5
    const double delta = 0.4;
    const std::size_t n = 100, dim = 13;
    const auto inst = SubspaceInstance::from_delta(coordinate_rows(n, dim), delta);
    core::ThetaOptions options;
    options.backend = integrator::Backend::direct;
    const auto report = short_vector_test(inst, delta, 0.05, 5, options);
    EXPECT_NEAR(std::pow(jacobi::theta_1d(inst.s), double(dim)), 1.5, 0.05);
    EXPECT_EQ(report.decision, Decision::inconclusive) << report.lower << " " << report.upper;
}

TEST(ShortVectorTest, PremiseChecks)
{
    EXPECT_THROW(short_vector_test(SubspaceInstance::from_delta(path_differences(12), -0.3), -0.3, 0.1, 0),
                 ValidationError);
    EXPECT_THROW(short_vector_test(SubspaceInstance::from_delta(path_differences(12), 1.5), 1.0, 0.1, 0),
                 ValidationError);
}

TEST(DistLowerBoundTest, Examples)
{
    EXPECT_NEAR(dist_lower_bound_subspace(RectMatrix::from_rows({{1, 0}})), 1.0, 1e-12);
    EXPECT_NEAR(dist_lower_bound_subspace(RectMatrix::from_rows({{3, 4}})), 0.2, 1e-12);
    EXPECT_NEAR(dist_lower_bound_subspace(RectMatrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})), 1.0, 1e-12);
    const auto p = linalg::row_space_projection(RectMatrix::from_rows({{3, 4}}));
    const double d = linalg::norm(linalg::multiply(p, std::vector<double>{1, 0}));
    EXPECT_NEAR(d, 0.6, 1e-12);
    EXPECT_GE(d, 0.2);
}

TEST(DistLowerBoundTest, HoldsForRandomIntegerPoints)
{
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<int> entry(-3, 3);
    for (int trial = 0; trial < 50; ++trial) {
        RectMatrix a(2, 4);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 4; ++j) a(i, j) = entry(rng);
        const auto p = [&] {
            try {
                return linalg::row_space_projection(a);
            } catch (const ValidationError&) {
                return SymmetricMatrix(0);
            }
        }();
        if (p.n() == 0) continue;
        const double bound = dist_lower_bound_subspace(a);
        for (int k = 0; k < 20; ++k) {
            std::vector<double> x(4);
            for (double& c : x) c = entry(rng);
            // distance to ker A is the length of the projection onto the row space
            const double d = linalg::norm(linalg::multiply(p, x));
            if (d > 1e-9) EXPECT_GE(d, bound - 1e-12);
        }
    }
}

TEST(ThetaTailBoundTest, Examples)
{
    EXPECT_DOUBLE_EQ(theta_tail_bound(10, 5.0, 3), std::exp(-3.0));
    EXPECT_THROW(theta_tail_bound(10, 5.0, 2), ValidationError);
    EXPECT_THROW(theta_tail_bound(10, 5.0, 15), ValidationError);

    double tail = 0.0;
    for (int a = -6; a <= 6; ++a)
        for (int b = -6; b <= 6; ++b)
            if (a * a + b * b >= 3) tail += std::exp(-5.0 * (a * a + b * b));
    EXPECT_LE(tail, std::exp(-3.0));
}

TEST(LatticeBasisTest, GramAndDeterminant)
{
    const auto basis = LatticeBasis::from_rows(RectMatrix::from_rows({{2, 0}, {1, 1}}));
    EXPECT_DOUBLE_EQ(basis.gram(0, 0), 4.0);
    EXPECT_DOUBLE_EQ(basis.gram(0, 1), 2.0);
    EXPECT_DOUBLE_EQ(basis.gram(1, 1), 2.0);
    EXPECT_NEAR(basis.det_lattice, 2.0, 1e-12);
    EXPECT_NEAR(basis.log_det, std::log(2.0), 1e-12);
    EXPECT_THROW(LatticeBasis::from_rows(RectMatrix::from_rows({{1, 2}, {2, 4}})), ValidationError);
    EXPECT_THROW(LatticeBasis::from_rows(RectMatrix::from_rows({{1, 2, 3}})), ValidationError);
}

TEST(LatticeBasisTest, IntegerLatticeMembership)
{
    EXPECT_TRUE(contains_integer_lattice(LatticeBasis::from_rows(RectMatrix::from_rows({{0.5, 0}, {0, 1}}))));
    EXPECT_TRUE(contains_integer_lattice(LatticeBasis::from_rows(RectMatrix::from_rows({{0.5, 0.5}, {0, 1}}))));
    EXPECT_FALSE(contains_integer_lattice(LatticeBasis::from_rows(RectMatrix::from_rows({{2, 0}, {0, 1}}))));
    EXPECT_FALSE(contains_integer_lattice(LatticeBasis::from_rows(RectMatrix::from_rows({{0.3, 0}, {0, 1}}))));
}

TEST(DistanceIntervalTest, IntegerLatticeAtOrigin)
{
    const auto basis = LatticeBasis::from_rows(RectMatrix::from_rows({{1, 0}, {0, 1}}));
    const auto d = distance_interval(basis, std::vector<double>{0, 0}, 1.0, 1e-8, 0);
    EXPECT_EQ(d.d_lo, 0.0);
    EXPECT_LE(d.d_hi, 0.01);
    EXPECT_NEAR(d.log_ratio, 0.0, 1e-7);
}

TEST(DistanceIntervalTest, ScalarHalfShift)
{
    const double q = std::exp(-kPiSq);
    const double r = std::log(jacobi::theta_1d(1.0) / jacobi::theta_1d_shifted(1.0, 0.5));
    EXPECT_LE(r, 41.0 * q * 0.25);
    EXPECT_GE(r, 13.0 * q * 0.25);

    const auto basis = LatticeBasis::from_rows(RectMatrix::from_rows({{1}}));
    const auto d = distance_interval(basis, std::vector<double>{0.5}, 1.0, 1e-8, 0);
    EXPECT_NEAR(d.log_ratio, r, 1e-3 * r);
    EXPECT_LE(d.d_lo, 0.5);
    EXPECT_GE(d.d_hi, 0.5);
    EXPECT_LE(d.d_hi / d.d_lo, 1.81);
}

TEST(DistanceIntervalTest, ContainsDistanceOnRefinedLattices)
{
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const auto basis = refined_lattice(rng, n, trial % 2 == 1);
        ASSERT_TRUE(contains_integer_lattice(basis));
        std::vector<double> v(n);
        for (double& x : v) x = coord(rng);
        const auto d = distance_interval(basis, v, 1.0, 1e-6, 100 + trial);
        const double exact = oracle::brute_distance(basis.vectors, v);
        EXPECT_LE(d.d_lo, exact) << "trial " << trial;
        EXPECT_GE(d.d_hi, exact) << "trial " << trial;
    }
}

TEST(DistanceIntervalTest, Rejections)
{
    const auto coarse = LatticeBasis::from_rows(RectMatrix::from_rows({{2, 0}, {0, 1}}));
    EXPECT_THROW(distance_interval(coarse, std::vector<double>{0.5, 0.5}, 1.0, 0.01, 0), ValidationError);
    const auto z2 = LatticeBasis::from_rows(RectMatrix::from_rows({{1, 0}, {0, 1}}));
    EXPECT_THROW(distance_interval(z2, std::vector<double>{0.5, 0.5}, 1.5, 0.01, 0), ValidationError);
    EXPECT_THROW(distance_interval(z2, std::vector<double>{0.5}, 1.0, 0.01, 0), ValidationError);
}

TEST(DecisionTest, Names)
{
    EXPECT_EQ(to_string(Decision::no_short), "NO_SHORT");
    EXPECT_EQ(to_string(Decision::many_short), "MANY_SHORT");
    EXPECT_EQ(to_string(Decision::inconclusive), "INCONCLUSIVE");
}
