#include "theta/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "theta/errors.hpp"
#include "theta/rng.hpp"

namespace theta::integrator {

namespace {

constexpr std::size_t kSubstreamsPerRound = 8;
constexpr std::size_t kSubstreamSize = 512;

// Running mean / M2, merged with Chan's pairwise update.
struct Moments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        count += 1.0;
        const double delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
    }

    void merge(const Moments& other)
    {
        if (other.count == 0.0) return;
        if (count == 0.0) {
            *this = other;
            return;
        }
        const double total = count + other.count;
        const double delta = other.mean - mean;
        mean += delta * other.count / total;
        m2 += other.m2 + delta * delta * count * other.count / total;
        count = total;
    }

    double rel_stderr() const
    {
        if (count < 2.0) return std::numeric_limits<double>::infinity();
        if (mean <= 0.0) return std::numeric_limits<double>::infinity();
        const double var = std::max(0.0, m2 / (count - 1.0));
        return std::sqrt(var / count) / mean;
    }
};

double checked(double value)
{
    if (!std::isfinite(value)) throw Error("log-integrand returned a non-finite value");
    return value;
}

void validate(const IntegralRequest& request)
{
    if (!request.log_h) throw ValidationError("integral request has no log-integrand");
    if (!(request.eps > 0.0)) throw ValidationError("integral request: eps must be positive");
    if (!(request.conf > 0.0 && request.conf < 1.0)) throw ValidationError("integral request: conf must lie in (0, 1)");
}

std::size_t thread_count(const IntegralRequest& request)
{
    return request.threads > 0 ? request.threads : default_thread_count();
}

Estimate exact_zero_dim(const IntegralRequest& request)
{
    const double log_value = checked(request.log_h(std::span<const double>{}));
    Estimate e;
    e.log_value = log_value;
    e.value = std::exp(log_value);
    e.rel_stderr = 0.0;
    e.n_evals = 1;
    e.seed = request.seed;
    e.converged = true;
    e.backend = request.backend == Backend::walk ? Backend::walk : Backend::direct;
    return e;
}

Estimate finish(const Moments& moments, double shift, std::size_t evals, const IntegralRequest& request,
                Backend backend, double z)
{
    Estimate e;
    e.log_value = shift + std::log(moments.mean);
    e.value = std::exp(e.log_value);
    e.rel_stderr = moments.rel_stderr();
    e.n_evals = evals;
    e.seed = request.seed;
    e.backend = backend;
    e.converged = z * e.rel_stderr <= request.eps;
    return e;
}

} // namespace

std::string_view to_string(Backend backend)
{
    switch (backend) {
    case Backend::automatic: return "auto";
    case Backend::direct: return "direct";
    case Backend::walk: return "walk";
    }
    return "auto";
}

Backend backend_from_string(std::string_view name)
{
    if (name == "auto") return Backend::automatic;
    if (name == "direct") return Backend::direct;
    if (name == "walk") return Backend::walk;
    throw ValidationError("unknown integrator backend '" + std::string(name) + "'");
}

double normal_quantile_two_sided(double conf)
{
    if (!(conf > 0.0 && conf < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
    const double p = 0.5 + 0.5 * conf;
    // Acklam's rational approximation followed by two Newton steps on erfc.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    double x;
    if (p > 1.0 - 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    for (int i = 0; i < 2; ++i) {
        const double err = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        x -= err / pdf;
    }
    return x;
}

Estimate estimate_direct(const IntegralRequest& request)
{
    validate(request);
    if (request.dim == 0) return exact_zero_dim(request);

    const std::size_t m = request.dim;
    const double z = normal_quantile_two_sided(request.conf);
    const std::size_t threads = thread_count(request);
    const std::size_t substream = std::clamp<std::size_t>(request.max_evals / kSubstreamsPerRound, 1, kSubstreamSize);
    const std::size_t round_evals = substream * kSubstreamsPerRound;

    // Weights are exp(log_h - shift); with shift >= sup log_h they lie in (0, 1].
    const double shift = request.log_h_upper ? *request.log_h_upper : checked(request.log_h(std::vector<double>(m, 0.0)));

    Moments total;
    std::size_t evals = 0;
    std::size_t next_stream = 0;
    std::vector<Moments> slots(kSubstreamsPerRound);
    while (evals + round_evals <= std::max(request.max_evals, round_evals)) {
        parallel_for(kSubstreamsPerRound, threads, [&](std::size_t slot) {
            std::mt19937_64 gen(derive_seed(request.seed, next_stream + slot));
            std::normal_distribution<double> normal;
            std::vector<double> t(m);
            Moments local;
            for (std::size_t s = 0; s < substream; ++s) {
                for (double& x : t) x = normal(gen);
                local.add(std::exp(checked(request.log_h(t)) - shift));
            }
            slots[slot] = local;
        });
        for (const auto& slot : slots) total.merge(slot);
        next_stream += kSubstreamsPerRound;
        evals += round_evals;
        if (z * total.rel_stderr() <= request.eps) break;
        if (evals >= request.max_evals) break;
    }
    return finish(total, shift, evals, request, Backend::direct, z);
}

Estimate estimate_walk(const IntegralRequest& request, const WalkOptions& options)
{
    validate(request);
    if (request.dim == 0) return exact_zero_dim(request);
    if (options.temperatures < 2 || options.moves_per_temperature < 1 || !(options.beta_min > 0.0 && options.beta_min < 1.0))
        throw ValidationError("walk options: need >= 2 temperatures, >= 1 move, beta_min in (0, 1)");

    const std::size_t m = request.dim;
    const double z = normal_quantile_two_sided(request.conf);
    const std::size_t threads = thread_count(request);
    const int temps = options.temperatures;
    const int moves = options.moves_per_temperature;

    std::vector<double> betas(temps + 1, 0.0);
    for (int i = 1; i <= temps; ++i)
        betas[i] = std::pow(options.beta_min, double(temps - i) / double(temps - 1));

    // Step size tuned on a pilot chain at beta = 1 until acceptance lies in [0.3, 0.6].
    std::size_t evals = 0;
    double step = 2.38 / std::sqrt(double(m));
    {
        std::mt19937_64 gen(derive_seed(request.seed, ~std::uint64_t{0}));
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> uniform;
        std::vector<double> t(m, 0.0), proposal(m);
        double log_target = checked(request.log_h(t));
        ++evals;
        for (int block = 0; block < 40; ++block) {
            int accepted = 0;
            constexpr int kBlock = 50;
            for (int it = 0; it < kBlock; ++it) {
                double norm_t = 0.0, norm_p = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    proposal[i] = t[i] + step * normal(gen);
                    norm_t += t[i] * t[i];
                    norm_p += proposal[i] * proposal[i];
                }
                const double log_prop = checked(request.log_h(proposal));
                ++evals;
                const double log_ratio = (log_prop - 0.5 * norm_p) - (log_target - 0.5 * norm_t);
                if (std::log(uniform(gen)) < log_ratio) {
                    t.swap(proposal);
                    log_target = log_prop;
                    ++accepted;
                }
            }
            const double rate = double(accepted) / kBlock;
            if (rate >= 0.3 && rate <= 0.6) break;
            step *= rate < 0.3 ? 0.75 : 1.35;
        }
    }

    const std::size_t per_particle = 1 + std::size_t(temps - 1) * std::size_t(moves);
    const std::size_t particles_per_stream =
        std::clamp<std::size_t>(request.max_evals / (per_particle * kSubstreamsPerRound), 1, 64);
    const std::size_t round_evals = particles_per_stream * kSubstreamsPerRound * per_particle;

    const double shift = request.log_h_upper ? *request.log_h_upper : checked(request.log_h(std::vector<double>(m, 0.0)));

    struct Slot {
        Moments moments;
        std::size_t proposed = 0;
        std::size_t accepted = 0;
    };
    Moments total;
    std::size_t proposed = 0, accepted = 0;
    std::size_t next_stream = 0;
    std::vector<Slot> slots(kSubstreamsPerRound);
    for (;;) {
        parallel_for(kSubstreamsPerRound, threads, [&](std::size_t slot) {
            std::mt19937_64 gen(derive_seed(request.seed, next_stream + slot));
            std::normal_distribution<double> normal;
            std::uniform_real_distribution<double> uniform;
            std::vector<double> t(m), proposal(m);
            Slot local;
            for (std::size_t p = 0; p < particles_per_stream; ++p) {
                double norm_t = 0.0;
                for (double& x : t) {
                    x = normal(gen);
                    norm_t += x * x;
                }
                double h = checked(request.log_h(t));
                double log_w = 0.0;
                for (int i = 1; i <= temps; ++i) {
                    log_w += (betas[i] - betas[i - 1]) * h;
                    if (i == temps) break;
                    const double beta = betas[i];
                    for (int mv = 0; mv < moves; ++mv) {
                        double norm_p = 0.0;
                        for (std::size_t k = 0; k < m; ++k) {
                            proposal[k] = t[k] + step * normal(gen);
                            norm_p += proposal[k] * proposal[k];
                        }
                        const double h_prop = checked(request.log_h(proposal));
                        ++local.proposed;
                        const double log_ratio = (beta * h_prop - 0.5 * norm_p) - (beta * h - 0.5 * norm_t);
                        if (std::log(uniform(gen)) < log_ratio) {
                            t.swap(proposal);
                            h = h_prop;
                            norm_t = norm_p;
                            ++local.accepted;
                        }
                    }
                }
                local.moments.add(std::exp(log_w - shift));
            }
            slots[slot] = local;
        });
        for (const auto& slot : slots) {
            total.merge(slot.moments);
            proposed += slot.proposed;
            accepted += slot.accepted;
        }
        next_stream += kSubstreamsPerRound;
        evals += round_evals;
        if (total.count >= 16 && z * total.rel_stderr() <= request.eps) break;
        if (evals + round_evals > request.max_evals) break;
    }
    Estimate e = finish(total, shift, evals, request, Backend::walk, z);
    e.acceptance_rate = proposed > 0 ? double(accepted) / double(proposed) : 0.0;
    return e;
}

Estimate integrate_gaussian_expectation(const IntegralRequest& request)
{
    validate(request);
    if (request.dim == 0) return exact_zero_dim(request);
    switch (request.backend) {
    case Backend::direct: return estimate_direct(request);
    case Backend::walk: return estimate_walk(request);
    case Backend::automatic: break;
    }
    if (request.dim > kWalkDimension) return estimate_walk(request);

    IntegralRequest first = request;
    first.max_evals = std::max<std::size_t>(1, request.max_evals / 2);
    Estimate direct = estimate_direct(first);
    if (direct.converged) return direct;

    IntegralRequest second = request;
    second.max_evals = std::max<std::size_t>(1, request.max_evals - direct.n_evals);
    second.seed = derive_seed(request.seed, 0x77616c6bULL);
    Estimate walk = estimate_walk(second);
    Estimate best = walk.rel_stderr < direct.rel_stderr ? walk : direct;
    best.n_evals = direct.n_evals + walk.n_evals;
    best.seed = request.seed;
    return best;
}

} // namespace theta::integrator
