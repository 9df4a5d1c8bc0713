#include "theta/theta.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "theta/errors.hpp"
#include "theta/jacobi.hpp"

namespace theta::core {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPiSq = kPi * kPi;

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

void check_finite(std::span<const double> xs, const char* what)
{
    for (double x : xs)
        if (!std::isfinite(x)) throw ValidationError(std::string(what) + " contains a non-finite entry");
}

void validate(const ThetaInstance& inst)
{
    const std::size_t n = inst.b.n();
    if (n == 0) throw ValidationError("theta instance needs n >= 1");
    check_finite(inst.b.entries(), "matrix");
    if (!(inst.eps > 0.0 && inst.eps <= 1.0)) throw ValidationError("eps must lie in (0, 1]");
    if (inst.shifted()) {
        if (inst.shift->size() != n) throw ValidationError("shift vector has length " + std::to_string(inst.shift->size()) +
                                                           ", expected " + std::to_string(n));
        check_finite(*inst.shift, "shift vector");
        for (double p : inst.phases)
            if (p != 0.0) throw ValidationError("an instance carries either a phase vector or a shift, not both");
    } else {
        if (inst.phases.size() != n)
            throw ValidationError("phase vector has length " + std::to_string(inst.phases.size()) + ", expected " +
                                  std::to_string(n));
        check_finite(inst.phases, "phase vector");
    }
}

bool in_window(double s, double lambda_max, bool half)
{
    const double upper = half ? half_window_upper(s) : integral_window_upper(s);
    return s >= 1.0 && lambda_max <= upper + 1e-12 * (1.0 + std::abs(upper));
}

bool smooth_ok(std::size_t n, double s, double gamma)
{
    return n >= 2 && gamma > 1.0 && s >= gamma * std::log(double(n)) && double(n) >= smooth_min_dimension(gamma);
}

linalg::SpectralBounds positive_bounds(const linalg::SymmetricMatrix& b)
{
    const auto bounds = linalg::spectral_bounds(b);
    if (!(bounds.lambda_min > 0.0))
        throw ValidationError("matrix is not positive definite (lambda_min = " + fmt(bounds.lambda_min) + ")");
    return bounds;
}

ThetaResult run_integral(const integrand::FactoredForm& form, double eps, std::uint64_t seed,
                         const ThetaOptions& options)
{
    const double margin = integrand::admissibility_margin(form);
    if (margin < 0.0)
        throw InternalError("integrand is not certified log-concave (admissibility margin " + fmt(margin) + ")");

    integrator::IntegralRequest request;
    request.dim = form.m();
    request.log_h = [&form](std::span<const double> t) { return integrand::log_product(form, t); };
    request.eps = eps / 3.0;
    request.conf = options.conf;
    request.seed = seed;
    request.max_evals = options.max_evals;
    request.log_h_upper = integrand::log_product_upper(form);
    request.backend = options.backend;
    request.threads = options.threads;

    ThetaResult out;
    out.estimate = integrator::integrate_gaussian_expectation(request);
    // E over N(0, I_m) equals (2 pi)^{-m/2} times the Lebesgue integral of G.
    out.estimate.log_value +=
        integrand::prefactor_log(form) + 0.5 * static_cast<double>(form.m()) * std::log(2.0 * kPi);
    out.estimate.value = std::exp(out.estimate.log_value);
    out.K = form.order().K;
    out.s = form.s();
    out.truncation_rel_error =
        std::expm1(jacobi::truncation_log_error(static_cast<int>(form.n()), form.q(), form.order()));
    return out;
}

ThetaResult exact_result(double value, std::uint64_t points, int k, double s, double rel_error, std::uint64_t seed)
{
    if (!(value > 0.0)) throw InternalError("enumerated theta value is not positive (" + fmt(value) + ")");
    ThetaResult out;
    out.estimate.value = value;
    out.estimate.log_value = std::log(value);
    out.estimate.rel_stderr = 0.0;
    out.estimate.n_evals = static_cast<std::size_t>(points);
    out.estimate.seed = seed;
    out.estimate.converged = true;
    out.K = k;
    out.s = s;
    out.truncation_rel_error = rel_error;
    return out;
}

ThetaResult smooth_enumeration(const linalg::SymmetricMatrix& b, std::span<const double> phases, double s, double eps,
                               double gamma, std::uint64_t seed, const oracle::OracleCaps& caps)
{
    const std::size_t n = b.n();
    const int k = smooth_radius(n, gamma, eps);
    const auto r = oracle::brute_theta(b, phases, s, k, caps);
    if (r.value < 0.5) throw InternalError("smooth-range theta fell below 1/2 (" + fmt(r.value) + ")");
    const double tail = std::min(tail_bound_smooth(n, gamma, k), r.tail_bound);
    return exact_result(r.value, r.points, k, s, tail / r.value, seed);
}

void scale_result(ThetaResult& result, double log_scale)
{
    result.estimate.log_value += log_scale;
    result.estimate.value = std::exp(result.estimate.log_value);
}

} // namespace

ThetaInstance make_sum_instance(linalg::SymmetricMatrix b, linalg::Vector phases, double eps, std::uint64_t seed)
{
    if (phases.empty()) phases.assign(b.n(), 0.0);
    ThetaInstance inst{std::move(b), std::move(phases), std::nullopt, eps, seed};
    validate(inst);
    return inst;
}

ThetaInstance make_shifted_instance(linalg::SymmetricMatrix b, linalg::Vector y, double eps, std::uint64_t seed)
{
    ThetaInstance inst{std::move(b), {}, std::move(y), eps, seed};
    validate(inst);
    return inst;
}

std::string_view to_string(Regime regime)
{
    switch (regime) {
    case Regime::integral: return "INTEGRAL";
    case Regime::reciprocal: return "RECIPROCAL";
    case Regime::smooth: return "SMOOTH";
    case Regime::direct_oracle: return "DIRECT_ORACLE";
    case Regime::unsupported: return "UNSUPPORTED";
    }
    return "UNSUPPORTED";
}

Regime regime_from_string(std::string_view name)
{
    for (Regime r : {Regime::integral, Regime::reciprocal, Regime::smooth, Regime::direct_oracle, Regime::unsupported})
        if (to_string(r) == name) return r;
    throw ValidationError("unknown regime '" + std::string(name) + "'");
}

double ThetaResult::combined_rel_error(double conf) const
{
    return integrator::normal_quantile_two_sided(conf) * estimate.rel_stderr + truncation_rel_error;
}

double integral_window_upper(double s)
{
    const double a = -std::expm1(-s);
    return s + std::exp(s) / 4.0 * a * a * (-std::expm1(-2.0 * s));
}

double half_window_upper(double s)
{
    const double a = -std::expm1(-s);
    return s + std::exp(s) / 2.0 * a * a * (-std::expm1(-2.0 * s));
}

double smooth_min_dimension(double gamma)
{
    if (!(gamma > 1.0)) return std::numeric_limits<double>::infinity();
    return std::exp(5.0 / (gamma - 1.0));
}

double tail_bound_smooth(std::size_t n, double gamma, int k)
{
    if (n < 2) throw ValidationError("smooth tail bound needs n >= 2");
    if (!(gamma >= 1.0)) throw ValidationError("smooth tail bound needs gamma >= 1");
    if (k < 1) throw ValidationError("smooth tail bound needs k >= 1");
    return 60.0 * std::exp((1.0 - gamma) * k * std::log(double(n)));
}

int smooth_radius(std::size_t n, double gamma, double eps)
{
    if (!(gamma > 1.0)) throw ValidationError("smooth radius needs gamma > 1");
    if (!(eps > 0.0)) throw ValidationError("smooth radius needs eps > 0");
    for (int k = 1; k < 10'000; ++k)
        if (tail_bound_smooth(n, gamma, k) <= eps / 4.0) return k;
    throw ConvergenceError("smooth radius search exceeded 10000");
}

RegimeReport select_regime(const ThetaInstance& inst, const ThetaOptions& options)
{
    validate(inst);
    const std::size_t n = inst.b.n();
    const auto bounds = positive_bounds(inst.b);
    const bool half = options.accept_half_window;
    const char* window = half ? "/2 window" : "/4 window";

    if (!inst.shifted()) {
        const double s = bounds.lambda_min;
        if (in_window(s, bounds.lambda_max, half))
            return {Regime::integral, s,
                    std::string("sI <= B <= upper I with s = ") + fmt(s) + ", lambda_max = " + fmt(bounds.lambda_max) +
                        " inside the " + window};
        if (smooth_ok(n, s, options.gamma))
            return {Regime::smooth, s, "lambda_min = " + fmt(s) + " >= gamma ln n with n >= e^{5/(gamma-1)}"};
    } else {
        // Spectrum of pi^2 B^-1 from that of B.
        const double s = kPiSq / bounds.lambda_max;
        const double top = kPiSq / bounds.lambda_min;
        if (in_window(s, top, half))
            return {Regime::reciprocal, s,
                    std::string("pi^2 B^-1 has s = ") + fmt(s) + ", lambda_max = " + fmt(top) + " inside the " + window};
        if (smooth_ok(n, s, options.gamma))
            return {Regime::smooth, s, "pi^2 B^-1 has lambda_min = " + fmt(s) + " >= gamma ln n"};
    }
    if (n <= options.direct_oracle_dim)
        return {Regime::direct_oracle, bounds.lambda_min,
                "n = " + std::to_string(n) + " within the brute-force cutoff " +
                    std::to_string(options.direct_oracle_dim)};
    return {Regime::unsupported, bounds.lambda_min,
            "lambda_min = " + fmt(bounds.lambda_min) + ", lambda_max = " + fmt(bounds.lambda_max) +
                " fit no supported regime at n = " + std::to_string(n)};
}

ThetaResult theta_sum(const ThetaInstance& inst, const ThetaOptions& options)
{
    validate(inst);
    if (inst.shifted()) throw ValidationError("theta_sum takes a phase vector, not a shift");
    const std::size_t n = inst.b.n();
    const auto bounds = positive_bounds(inst.b);
    const double s = bounds.lambda_min;
    if (!in_window(s, bounds.lambda_max, options.accept_half_window))
        throw RegimeError("theta_sum: B is outside the integral window (s = " + fmt(s) +
                          ", lambda_max = " + fmt(bounds.lambda_max) + ")");
    const auto order = jacobi::truncation_order(static_cast<int>(n), inst.eps, s);
    const auto form = integrand::FactoredForm::from_matrix(inst.b, inst.phases, s, order);
    ThetaResult out = run_integral(form, inst.eps, inst.seed, options);
    out.regime = {Regime::integral, s, "log-concave integral representation"};
    return out;
}

ThetaResult theta_shifted(const ThetaInstance& inst, const ThetaOptions& options)
{
    validate(inst);
    if (!inst.shifted()) throw ValidationError("theta_shifted needs a shift vector");
    const auto regime = select_regime(inst, options);
    if (regime.regime != Regime::reciprocal)
        throw RegimeError("theta_shifted: pi^2 B^-1 is outside the integral window (" + regime.detail + ")");
    const ShiftedThetaEvaluator evaluator(inst.b, inst.eps, options);
    return evaluator(*inst.shift, inst.seed);
}

ThetaResult theta_smooth(const ThetaInstance& inst, const ThetaOptions& options)
{
    validate(inst);
    const std::size_t n = inst.b.n();
    if (!inst.shifted()) {
        const auto bounds = positive_bounds(inst.b);
        if (!smooth_ok(n, bounds.lambda_min, options.gamma))
            throw RegimeError("theta_smooth: needs n >= 2, gamma > 1, lambda_min >= gamma ln n and n >= e^{5/(gamma-1)}");
        ThetaResult out = smooth_enumeration(inst.b, inst.phases, bounds.lambda_min, inst.eps, options.gamma, inst.seed,
                                             options.caps);
        out.regime = {Regime::smooth, bounds.lambda_min, "enumeration over |x|^2 <= " + std::to_string(out.K)};
        return out;
    }
    const ShiftedThetaEvaluator evaluator(inst.b, inst.eps, options);
    if (evaluator.regime().regime != Regime::smooth)
        throw RegimeError("theta_smooth: the reciprocal form is not in the smooth range");
    return evaluator(*inst.shift, inst.seed);
}

ThetaResult theta_direct(const ThetaInstance& inst, const ThetaOptions& options)
{
    validate(inst);
    const std::size_t n = inst.b.n();
    if (n > options.direct_oracle_dim)
        throw RegimeError("direct summation is limited to n <= " + std::to_string(options.direct_oracle_dim));
    const double s = positive_bounds(inst.b).lambda_min;
    const auto r = inst.shifted() ? oracle::brute_theta_shifted_auto(inst.b, *inst.shift, inst.eps, options.caps)
                                  : oracle::brute_theta_auto(inst.b, inst.phases, inst.eps, options.caps);
    ThetaResult out = exact_result(r.value, r.points, r.k, s, r.tail_bound / r.value, inst.seed);
    out.regime = {Regime::direct_oracle, s, "enumeration over |x - round(y)|^2 <= " + std::to_string(r.k)};
    return out;
}

ThetaResult evaluate(const ThetaInstance& inst, const ThetaOptions& options)
{
    const auto regime = select_regime(inst, options);
    ThetaResult out;
    switch (regime.regime) {
    case Regime::integral: out = theta_sum(inst, options); break;
    case Regime::reciprocal: out = theta_shifted(inst, options); break;
    case Regime::smooth: out = theta_smooth(inst, options); break;
    case Regime::direct_oracle: out = theta_direct(inst, options); break;
    case Regime::unsupported: throw RegimeError("no supported regime: " + regime.detail);
    }
    out.regime = regime;
    return out;
}

ShiftedThetaEvaluator::ShiftedThetaEvaluator(const linalg::SymmetricMatrix& b, double eps, ThetaOptions options)
    : n_(b.n()), eps_(eps), options_(std::move(options))
{
    if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("eps must lie in (0, 1]");
    if (n_ == 0) {
        regime_ = {Regime::direct_oracle, 0.0, "empty sum over Z^0 equals 1"};
        return;
    }
    regime_ = select_regime(make_shifted_instance(b, linalg::Vector(n_, 0.0), eps, 0), options_);
    switch (regime_.regime) {
    case Regime::reciprocal:
    case Regime::smooth: {
        const auto inv = linalg::spd_inverse(b);
        form_ = kPiSq * inv.inverse;
        log_scale_ = 0.5 * static_cast<double>(n_) * std::log(kPi) - 0.5 * inv.log_det;
        if (regime_.regime == Regime::reciprocal) {
            order_ = jacobi::truncation_order(static_cast<int>(n_), eps, regime_.s);
            const auto form = integrand::FactoredForm::from_matrix(form_, linalg::Vector(n_, 0.0), regime_.s, order_);
            factor_ = form.a();
        }
        break;
    }
    case Regime::direct_oracle: original_ = b; break;
    case Regime::integral:
    case Regime::unsupported: throw RegimeError("shifted theta: no supported regime: " + regime_.detail);
    }
}

ThetaResult ShiftedThetaEvaluator::operator()(std::span<const double> y, std::uint64_t seed) const
{
    if (y.size() != n_) throw ValidationError("shift vector has the wrong length");
    check_finite(y, "shift vector");
    if (n_ == 0) {
        ThetaResult out = exact_result(1.0, 1, 0, 0.0, 0.0, seed);
        out.regime = regime_;
        return out;
    }
    linalg::Vector phases(n_);
    for (std::size_t i = 0; i < n_; ++i) phases[i] = 2.0 * kPi * y[i];
    ThetaResult out;
    switch (regime_.regime) {
    case Regime::reciprocal: {
        const integrand::FactoredForm form(factor_, std::move(phases), regime_.s, order_);
        out = run_integral(form, eps_, seed, options_);
        scale_result(out, log_scale_);
        break;
    }
    case Regime::smooth:
        out = smooth_enumeration(form_, phases, regime_.s, eps_, options_.gamma, seed, options_.caps);
        scale_result(out, log_scale_);
        break;
    case Regime::direct_oracle: {
        const auto r = oracle::brute_theta_shifted_auto(original_, y, eps_, options_.caps);
        out = exact_result(r.value, r.points, r.k, regime_.s, r.tail_bound / r.value, seed);
        break;
    }
    default: throw InternalError("shifted theta evaluator in an unexpected regime");
    }
    out.regime = regime_;
    return out;
}

} // namespace theta::core
