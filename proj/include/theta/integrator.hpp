#pragma once

// Monte Carlo estimation of E[exp(h(t))] for t ~ N(0, I_m), where h + Gaussian log-density is
// log-concave. Two interchangeable backends share one contract:
//
//   direct  plain importance sampling with the standard Gaussian as proposal;
//   walk    annealed importance sampling: random-walk Metropolis moves along a geometric
//           temperature ladder, each particle carrying the telescoped ratio of normalisers.
//
// Work is split into fixed-size substreams whose seeds derive from the master seed by index,
// and merged in index order, so results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>

namespace theta::integrator {

enum class Backend { automatic, direct, walk };

std::string_view to_string(Backend backend);
Backend backend_from_string(std::string_view name);

using LogIntegrand = std::function<double(std::span<const double>)>;

struct IntegralRequest {
    std::size_t dim = 0;
    LogIntegrand log_h;
    double eps = 0.05;
    double conf = 0.95;
    std::uint64_t seed = 0;
    std::size_t max_evals = 4'000'000;
    // Upper bound on log_h; weights are formed relative to it so they stay in range.
    std::optional<double> log_h_upper;
    Backend backend = Backend::automatic;
    // 0 selects default_thread_count().
    std::size_t threads = 0;
};

struct Estimate {
    double value = 0.0;
    double log_value = 0.0;
    double rel_stderr = 0.0;
    std::size_t n_evals = 0;
    std::uint64_t seed = 0;
    bool converged = false;
    Backend backend = Backend::direct;
    // Metropolis acceptance rate of the walk backend; NaN for direct sampling.
    double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
};

struct WalkOptions {
    int temperatures = 12;
    int moves_per_temperature = 3;
    double beta_min = 1e-3;
};

// z with P(|N(0,1)| <= z) = conf.
double normal_quantile_two_sided(double conf);

Estimate integrate_gaussian_expectation(const IntegralRequest& request);

Estimate estimate_direct(const IntegralRequest& request);
Estimate estimate_walk(const IntegralRequest& request, const WalkOptions& options = {});

// Dimension above which the automatic choice goes straight to the walk.
inline constexpr std::size_t kWalkDimension = 25;

} // namespace theta::integrator
