#pragma once

#include <span>
#include <vector>

#include "theta/jacobi.hpp"
#include "theta/linalg.hpp"

namespace theta::integrand {

// B = s I + A^T A / 2 together with the phase vector b, q = e^{-s} and truncation order K.
class FactoredForm {
public:
    FactoredForm(linalg::RectMatrix a, std::vector<double> phases, double s, jacobi::TruncationOrder order);

    // Splits b-mode input B as (lambda_min(B)) I + A^T A / 2.
    static FactoredForm from_matrix(const linalg::SymmetricMatrix& b, std::vector<double> phases, double s,
                                    jacobi::TruncationOrder order, double tol = linalg::kDefaultTol);

    std::size_t n() const noexcept { return phases_.size(); }
    std::size_t m() const noexcept { return a_.rows(); }
    const linalg::RectMatrix& a() const noexcept { return a_; }
    std::span<const double> phases() const noexcept { return phases_; }
    double s() const noexcept { return s_; }
    double q() const noexcept { return q_; }
    jacobi::TruncationOrder order() const noexcept { return order_; }
    // q^{2k-1} and q^{4k-2} for k = 1..K
    std::span<const double> odd_powers() const noexcept { return odd_; }
    std::span<const double> odd_powers_squared() const noexcept { return odd_sq_; }

    // s I + A^T A / 2
    linalg::SymmetricMatrix reconstructed() const;

private:
    linalg::RectMatrix a_;
    std::vector<double> phases_;
    double s_;
    double q_;
    jacobi::TruncationOrder order_;
    std::vector<double> odd_;
    std::vector<double> odd_sq_;
};

struct LogDensityValue {
    double log_g;
    std::vector<double> gradient;
};

// 1/2 - ||A^T A||_op * sum_{k>=1} q^{2k-1} / (1 - q^{2k-1})^2. Nonnegative certifies log-concavity.
double admissibility_margin(const FactoredForm& form);
double admissibility_series(double q);

// log of prod_j prod_{k<=K} (1 + 2 q^{2k-1} cos(b_j + (A^T t)_j) + q^{4k-2}), the non-Gaussian part.
double log_product(const FactoredForm& form, std::span<const double> t);

// log G(t) = -|t|^2/2 + log_product, with its analytic gradient.
LogDensityValue log_density(const FactoredForm& form, std::span<const double> t);

// -(m/2) ln(2 pi) + n sum_{k<=K} ln(1 - q^{2k})
double prefactor_log(const FactoredForm& form);

// n * sum_{k<=K} 2 ln(1 + q^{2k-1}); upper bound of log_product over all t.
double log_product_upper(const FactoredForm& form);

// d^2/dx^2 ln(1 + 2q cos x + q^2) at x = angle, and its maximum over x, 2q / (1 - q)^2.
double log_factor_curvature(double q, double angle);
double log_factor_curvature_bound(double q);

} // namespace theta::integrand
