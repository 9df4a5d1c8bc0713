#include "theta/integrand.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "theta/errors.hpp"

namespace theta::integrand {

namespace {

double reduce_phase(double phase) { return std::remainder(phase, 2.0 * std::numbers::pi); }

} // namespace

FactoredForm::FactoredForm(linalg::RectMatrix a, std::vector<double> phases, double s,
                           jacobi::TruncationOrder order)
    : a_(std::move(a)), phases_(std::move(phases)), s_(s), q_(std::exp(-s)), order_(order)
{
    if (phases_.empty()) throw ValidationError("factored form needs n >= 1");
    if (a_.cols() != phases_.size())
        throw ValidationError("factored form: A has " + std::to_string(a_.cols()) + " columns but b has " +
                              std::to_string(phases_.size()) + " entries");
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("factored form: s must be positive");
    if (order.K < 1) throw ValidationError("factored form: K must be at least 1");
    odd_.resize(order.K);
    odd_sq_.resize(order.K);
    for (int k = 1; k <= order.K; ++k) {
        odd_[k - 1] = std::exp(-s * (2.0 * k - 1.0));
        odd_sq_[k - 1] = odd_[k - 1] * odd_[k - 1];
    }
}

FactoredForm FactoredForm::from_matrix(const linalg::SymmetricMatrix& b, std::vector<double> phases, double s,
                                       jacobi::TruncationOrder order, double tol)
{
    linalg::SymmetricMatrix c = b;
    c -= linalg::SymmetricMatrix::identity(b.n(), s);
    return FactoredForm(linalg::factor_half_gram(c, tol), std::move(phases), s, order);
}

linalg::SymmetricMatrix FactoredForm::reconstructed() const
{
    auto out = linalg::SymmetricMatrix::identity(n(), s_);
    if (m() > 0) {
        auto g = linalg::gram_of_columns(a_);
        g *= 0.5;
        out += g;
    }
    return out;
}

double admissibility_series(double q)
{
    double sum = 0.0;
    for (int k = 1; k < 100000; ++k) {
        const double odd = std::pow(q, 2 * k - 1);
        const double term = odd / ((1.0 - odd) * (1.0 - odd));
        sum += term;
        if (term < 1e-17) break;
    }
    return sum;
}

double admissibility_margin(const FactoredForm& form)
{
    if (form.m() == 0) return 0.5;
    const double ata = std::pow(linalg::operator_norm(form.a()), 2);
    return 0.5 - ata * admissibility_series(form.q());
}

double log_product(const FactoredForm& form, std::span<const double> t)
{
    const std::size_t n = form.n();
    const std::size_t m = form.m();
    if (t.size() != m) throw ValidationError("log_product: t has wrong dimension");
    const auto odd = form.odd_powers();
    const auto odd_sq = form.odd_powers_squared();
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double phase = form.phases()[j];
        for (std::size_t i = 0; i < m; ++i) phase += form.a()(i, j) * t[i];
        const double c = std::cos(reduce_phase(phase));
        for (int k = 0; k < form.order().K; ++k) {
            const double factor = 1.0 + 2.0 * odd[k] * c + odd_sq[k];
            if (!(factor > 0.0)) throw InternalError("product factor is not positive");
            total += std::log(factor);
        }
    }
    return total;
}

LogDensityValue log_density(const FactoredForm& form, std::span<const double> t)
{
    const std::size_t n = form.n();
    const std::size_t m = form.m();
    if (t.size() != m) throw ValidationError("log_density: t has wrong dimension");
    const auto odd = form.odd_powers();
    const auto odd_sq = form.odd_powers_squared();
    LogDensityValue out{0.0, std::vector<double>(m, 0.0)};
    for (std::size_t i = 0; i < m; ++i) {
        out.log_g -= 0.5 * t[i] * t[i];
        out.gradient[i] = -t[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        double phase = form.phases()[j];
        for (std::size_t i = 0; i < m; ++i) phase += form.a()(i, j) * t[i];
        const double reduced = reduce_phase(phase);
        const double c = std::cos(reduced);
        const double sn = std::sin(reduced);
        // d/dphi ln(1 + 2 q cos phi + q^2) = -2 q sin phi / (1 + 2 q cos phi + q^2)
        double dphase = 0.0;
        for (int k = 0; k < form.order().K; ++k) {
            const double factor = 1.0 + 2.0 * odd[k] * c + odd_sq[k];
            if (!(factor > 0.0)) throw InternalError("product factor is not positive");
            out.log_g += std::log(factor);
            dphase -= 2.0 * odd[k] * sn / factor;
        }
        for (std::size_t i = 0; i < m; ++i) out.gradient[i] += form.a()(i, j) * dphase;
    }
    return out;
}

double prefactor_log(const FactoredForm& form)
{
    double sum = 0.0;
    for (int k = 1; k <= form.order().K; ++k) sum += std::log1p(-std::exp(-2.0 * k * form.s()));
    return -0.5 * static_cast<double>(form.m()) * std::log(2.0 * std::numbers::pi) +
           static_cast<double>(form.n()) * sum;
}

double log_product_upper(const FactoredForm& form)
{
    double sum = 0.0;
    for (double odd : form.odd_powers()) sum += 2.0 * std::log1p(odd);
    return static_cast<double>(form.n()) * sum;
}

double log_factor_curvature(double q, double angle)
{
    const double c = std::cos(angle);
    const double d = 1.0 + 2.0 * q * c + q * q;
    return -2.0 * q * ((1.0 + q * q) * c + 2.0 * q) / (d * d);
}

double log_factor_curvature_bound(double q) { return 2.0 * q / ((1.0 - q) * (1.0 - q)); }

} // namespace theta::integrand
