#include "theta/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "theta/errors.hpp"
#include "theta/rng.hpp"

namespace theta::sampler {

namespace {

constexpr double kPiSq = std::numbers::pi * std::numbers::pi;

core::ThetaOptions step_options(core::ThetaOptions options)
{
    // Prefix forms satisfy the sampler condition, which lies inside the /2 window.
    options.accept_half_window = true;
    return options;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct StepGeometry {
    linalg::Vector mu;
    double normal_sq = 0.0;
    linalg::SymmetricMatrix prefix;
};

// Splits G_r into the prefix G_{r-1}, mu = G_{r-1}^{-1} g and <u_r, w>^2 = G_rr - g^T mu.
StepGeometry geometry(const linalg::SymmetricMatrix& gram)
{
    const std::size_t r = gram.n();
    StepGeometry out;
    out.prefix = gram.leading(r - 1);
    linalg::Vector g(r - 1);
    for (std::size_t i = 0; i + 1 < r; ++i) g[i] = gram(i, r - 1);
    if (r > 1) {
        const auto entries = out.prefix.entries();
        out.mu = linalg::solve(linalg::RectMatrix::from_entries(r - 1, r - 1, {entries.begin(), entries.end()}), g);
    }
    out.normal_sq = gram(r - 1, r - 1) - linalg::dot(g, out.mu);
    if (!(out.normal_sq > 0.0)) throw InternalError("basis prefix lost full rank while sampling");
    return out;
}

CoordinateLaw build_law(const linalg::Vector& mu, double normal_sq, const core::ShiftedThetaEvaluator& theta, int l,
                        std::span<const double> y, std::uint64_t seed, double conf)
{
    const std::size_t r = y.size();
    const double eta = y[r - 1];
    const long long lo = static_cast<long long>(std::floor(eta)) - l;
    const long long hi = static_cast<long long>(std::ceil(eta)) + l;

    CoordinateLaw law;
    law.lo = lo;
    std::vector<double> log_weights;
    linalg::Vector target(r - 1);
    for (long long alpha = lo; alpha <= hi; ++alpha) {
        const double e = eta - double(alpha);
        for (std::size_t i = 0; i + 1 < r; ++i) target[i] = y[i] + e * mu[i];
        const auto result = theta(target, derive_seed(seed, static_cast<std::uint64_t>(alpha - lo)));
        law.max_theta_error = std::max(law.max_theta_error, result.combined_rel_error(conf));
        law.converged = law.converged && result.estimate.converged;
        log_weights.push_back(-normal_sq * e * e + result.estimate.log_value);
    }
    const double top = *std::max_element(log_weights.begin(), log_weights.end());
    double total = 0.0;
    law.probabilities.resize(log_weights.size());
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        law.probabilities[i] = std::exp(log_weights[i] - top);
        total += law.probabilities[i];
    }
    for (double& p : law.probabilities) p /= total;
    return law;
}

} // namespace

SamplerConfig SamplerConfig::make(lattice::LatticeBasis basis, linalg::Vector v, double eps, std::uint64_t seed)
{
    if (v.size() != basis.n()) throw ValidationError("target point has the wrong dimension");
    for (double x : v)
        if (!std::isfinite(x)) throw ValidationError("target point contains a non-finite entry");
    if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("eps must lie in (0, 1]");
    if (!sampler_condition(basis.bounds))
        throw RegimeError("sampler needs s = pi^2 / lambda_max >= 1 and lambda_min >= pi^2 / (s + e^s/4 (1-e^-s)(1-e^-2s))"
                          " (lambda_min = " +
                          std::to_string(basis.bounds.lambda_min) + ", lambda_max = " +
                          std::to_string(basis.bounds.lambda_max) + ")");
    return SamplerConfig{std::move(basis), std::move(v), eps, seed};
}

double sampler_scale(const linalg::SpectralBounds& bounds) { return kPiSq / bounds.lambda_max; }

bool sampler_condition(const linalg::SpectralBounds& bounds)
{
    if (!(bounds.lambda_min > 0.0)) return false;
    const double s = sampler_scale(bounds);
    if (s < 1.0) return false;
    const double upper = s + std::exp(s) / 4.0 * (-std::expm1(-s)) * (-std::expm1(-2.0 * s));
    return bounds.lambda_min >= kPiSq / upper * (1.0 - 1e-12);
}

double window_tail(std::size_t n, double lambda_min, double lambda_max, int l)
{
    return (2.0 * l + 3.0) * std::exp(double(n) * lambda_max / 4.0 - lambda_min * double(l) * double(l));
}

int window_radius(std::size_t n, double lambda_min, double lambda_max, double eps)
{
    if (n == 0 || !(lambda_min > 0.0) || !(lambda_max > 0.0) || !(eps > 0.0))
        throw ValidationError("window radius needs positive n, eigenvalue bounds and eps");
    const double target = eps / (10.0 * double(n));
    int l = 1;
    while (window_tail(n, lambda_min, lambda_max, l) > target) ++l;
    return l;
}

CoordinateLaw coordinate_distribution(const linalg::SymmetricMatrix& gram, std::span<const double> y, int l,
                                      double eps_local, std::uint64_t seed, const core::ThetaOptions& options)
{
    if (gram.n() == 0 || y.size() != gram.n()) throw ValidationError("coordinate law: dimension mismatch");
    if (l < 0) throw ValidationError("coordinate law: window must be nonnegative");
    const auto geo = geometry(gram);
    const core::ShiftedThetaEvaluator theta(geo.prefix, eps_local, step_options(options));
    return build_law(geo.mu, geo.normal_sq, theta, l, y, seed, options.conf);
}

Sampler::Sampler(SamplerConfig config, core::ThetaOptions options)
    : config_(std::move(config)), options_(step_options(std::move(options)))
{
    const auto& basis = config_.basis;
    const std::size_t n = basis.n();
    const auto bounds = basis.bounds;
    l_ = window_radius(n, bounds.lambda_min, bounds.lambda_max, config_.eps);
    tail_ = window_tail(n, bounds.lambda_min, bounds.lambda_max, l_);
    eps_local_ = config_.eps / (10.0 * double(n));

    const double slack = 1e-9 * (1.0 + bounds.lambda_max);
    steps_.reserve(n);
    for (std::size_t r = 1; r <= n; ++r) {
        auto geo = geometry(basis.gram.leading(r));
        if (r > 1) {
            const auto prefix_bounds = linalg::spectral_bounds(geo.prefix);
            if (prefix_bounds.lambda_min < bounds.lambda_min - slack ||
                prefix_bounds.lambda_max > bounds.lambda_max + slack)
                throw InternalError("prefix Gram of size " + std::to_string(r - 1) +
                                    " left the spectral bounds of the full basis");
        }
        core::ShiftedThetaEvaluator theta(geo.prefix, eps_local_, options_);
        if (r > 1 && theta.regime().regime != core::Regime::reciprocal)
            throw InternalError("prefix theta of size " + std::to_string(r - 1) +
                                " is not in the reciprocal regime: " + theta.regime().detail);
        steps_.push_back(Step{std::move(geo.mu), geo.normal_sq, std::move(theta)});
    }
}

CoordinateLaw Sampler::law(const Step& step, std::span<const double> y, std::uint64_t seed) const
{
    return build_law(step.mu, step.normal_sq, step.theta, l_, y, seed, options_.conf);
}

Draw Sampler::draw(std::uint64_t index) const
{
    const std::size_t n = config_.basis.n();
    const std::uint64_t draw_seed = derive_seed(config_.seed, index);
    std::mt19937_64 rng(derive_seed(draw_seed, 0));

    Draw out;
    out.coordinates.assign(n, 0);
    linalg::Vector y = oracle::basis_coordinates(config_.basis.vectors, config_.v);
    for (std::size_t r = n; r >= 1; --r) {
        const Step& step = steps_[r - 1];
        const auto law = this->law(step, y, derive_seed(draw_seed, r));
        if (!law.converged)
            throw ConvergenceError("theta evaluation for coordinate " + std::to_string(r - 1) + " did not converge");

        const double u = uniform01(rng);
        std::size_t pick = 0;
        double acc = 0.0;
        for (; pick + 1 < law.probabilities.size(); ++pick) {
            acc += law.probabilities[pick];
            if (u < acc) break;
        }
        const long long alpha = law.lo + static_cast<long long>(pick);
        out.coordinates[r - 1] = alpha;
        out.steps.push_back({r - 1, y[r - 1], law.lo, law.hi(), alpha, law.max_theta_error, law.converged});

        const double e = y[r - 1] - double(alpha);
        linalg::Vector next(r - 1);
        for (std::size_t i = 0; i + 1 < r; ++i) next[i] = y[i] + e * step.mu[i];
        y = std::move(next);
    }
    return out;
}

std::vector<Draw> Sampler::draw_many(std::size_t count) const
{
    std::vector<Draw> out(count);
    parallel_for(count, options_.threads == 0 ? default_thread_count() : options_.threads,
                 [&](std::size_t i) { out[i] = draw(i); });
    return out;
}

Draw sample(const SamplerConfig& config, const core::ThetaOptions& options)
{
    return Sampler(config, options).draw(0);
}

std::vector<Draw> sample_many(const SamplerConfig& config, std::size_t count, const core::ThetaOptions& options)
{
    // Draws run in parallel; each theta evaluation stays single-threaded.
    auto inner = options;
    inner.threads = 1;
    Sampler sampler(config, inner);
    std::vector<Draw> out(count);
    parallel_for(count, options.threads == 0 ? default_thread_count() : options.threads,
                 [&](std::size_t i) { out[i] = sampler.draw(i); });
    return out;
}

double banaszczyk_ratio_bound(const lattice::LatticeBasis& basis, std::span<const double> v,
                              const oracle::OracleCaps& caps)
{
    if (basis.n() <= caps.max_distance_dim) {
        const double d = oracle::brute_distance(basis.vectors, v, caps);
        return std::exp(d * d);
    }
    if (!lattice::contains_integer_lattice(basis))
        throw CapError("no certified distance available above n = " + std::to_string(caps.max_distance_dim));
    const auto interval = lattice::distance_interval(basis, v, 1.0, 0.05, 0);
    return std::exp(interval.d_hi * interval.d_hi);
}

} // namespace theta::sampler
