#include "theta/jacobi.hpp"

#include <cmath>
#include <string>

#include "theta/errors.hpp"

namespace theta::jacobi {

NomeParams NomeParams::from_s(double s)
{
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("nome exponent s must be positive and finite");
    return {s, std::exp(-s)};
}

double triple_product_lhs(double q, double angle, TruncationOrder order)
{
    if (!(q >= 0.0 && q < 1.0)) throw ValidationError("triple_product_lhs: q must lie in [0, 1)");
    if (order.K < 1) throw ValidationError("triple_product_lhs: K must be at least 1");
    const double c = std::cos(angle);
    double log_value = 0.0;
    for (int k = 1; k <= order.K; ++k) {
        const double odd = std::pow(q, 2 * k - 1);
        const double even = std::pow(q, 2 * k);
        // 1 + 2 odd cos + odd^2 >= (1 - odd)^2 > 0
        log_value += std::log1p(-even) + std::log(1.0 + 2.0 * odd * c + odd * odd);
    }
    return std::exp(log_value);
}

double triple_product_series(double q, double angle, int terms)
{
    if (!(q >= 0.0 && q < 1.0)) throw ValidationError("triple_product_series: q must lie in [0, 1)");
    double sum = 1.0;
    // smallest terms first
    for (int xi = terms; xi >= 1; --xi) sum += 2.0 * std::pow(q, double(xi) * xi) * std::cos(xi * angle);
    return sum;
}

double theta_1d(double s, int tail_terms)
{
    if (!(s > 0.0)) throw ValidationError("theta_1d: s must be positive");
    double sum = 0.0;
    for (int xi = tail_terms; xi >= 1; --xi) sum += 2.0 * std::exp(-s * double(xi) * xi);
    return 1.0 + sum;
}

double theta_1d(double s)
{
    if (!(s > 0.0)) throw ValidationError("theta_1d: s must be positive");
    // e^{-s T^2} < 1e-17 needs T^2 > 39.2 / s
    const int terms = static_cast<int>(std::ceil(std::sqrt(40.0 / s))) + 1;
    return theta_1d(s, terms);
}

double theta_1d_shifted(double s, double shift)
{
    if (!(s > 0.0)) throw ValidationError("theta_1d_shifted: s must be positive");
    const double centre = std::round(shift);
    const double delta = shift - centre;
    const int terms = static_cast<int>(std::ceil(std::sqrt(40.0 / s))) + 2;
    double sum = 0.0;
    for (int xi = terms; xi >= 1; --xi) {
        sum += std::exp(-s * (xi - delta) * (xi - delta));
        sum += std::exp(-s * (xi + delta) * (xi + delta));
    }
    return sum + std::exp(-s * delta * delta);
}

TruncationOrder truncation_order(int n, double eps, double s)
{
    if (n < 1) throw ValidationError("truncation_order: n must be at least 1");
    if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("truncation_order: eps must lie in (0, 1]");
    if (!(s >= 1.0)) throw ValidationError("truncation_order: s must be at least 1");
    const double budget = eps / 3.0;
    for (int k = 1;; ++k) {
        const double factor_tail = 5.0 * n * std::exp(-s * (2.0 * k - 1.0));
        const double prefactor_tail = 4.0 * n * std::exp(-s * 2.0 * k);
        if (factor_tail <= budget && prefactor_tail <= budget) return {k};
    }
}

double truncation_log_error(int n, double q, TruncationOrder order)
{
    if (!(q >= 0.0 && q < 1.0)) throw ValidationError("truncation_log_error: q must lie in [0, 1)");
    double tail = 0.0;
    for (int k = order.K + 1; k < order.K + 2000; ++k) {
        const double odd = std::pow(q, 2 * k - 1);
        if (odd < 1e-300) break;
        const double term = -2.0 * std::log1p(-odd) - std::log1p(-odd * q);
        tail += term;
        if (term < 1e-18 * tail) break;
    }
    return n * tail;
}

} // namespace theta::jacobi
