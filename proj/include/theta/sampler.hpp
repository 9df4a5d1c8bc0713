#pragma once

// Discrete Gaussian sampling P(u) ~ exp(-|u - v|^2) over a lattice, one basis coordinate at a
// time from the last to the first. Each conditional law over a window of integers is built from
// shifted theta sums of the remaining prefix lattice.

#include <cstdint>
#include <span>
#include <vector>

#include "theta/lattice.hpp"
#include "theta/theta.hpp"

namespace theta::sampler {

struct SamplerConfig {
    lattice::LatticeBasis basis;
    linalg::Vector v;
    double eps = 0.05;
    std::uint64_t seed = 0;

    // Validates dimensions, eps and the spectral input condition.
    static SamplerConfig make(lattice::LatticeBasis basis, linalg::Vector v, double eps, std::uint64_t seed);
};

// s = pi^2 / lambda_max, and whether s >= 1 and lambda_min >= pi^2 / (s + e^s/4 (1-e^-s)(1-e^-2s)).
double sampler_scale(const linalg::SpectralBounds& bounds);
bool sampler_condition(const linalg::SpectralBounds& bounds);

// Smallest l >= 1 with (2l+3) exp{n lambda_max / 4 - lambda_min l^2} <= eps / (10 n).
int window_radius(std::size_t n, double lambda_min, double lambda_max, double eps);
double window_tail(std::size_t n, double lambda_min, double lambda_max, int l);

struct CoordinateLaw {
    long long lo = 0; // probabilities[i] is the probability of lo + i
    std::vector<double> probabilities;
    double max_theta_error = 0.0; // largest combined relative error of the theta evaluations
    bool converged = true;

    long long hi() const noexcept { return lo + static_cast<long long>(probabilities.size()) - 1; }
};

struct StepDiagnostics {
    std::size_t coordinate = 0; // 0-based index of the sampled coordinate
    double eta = 0.0;           // its target coordinate
    long long lo = 0;
    long long hi = 0;
    long long chosen = 0;
    double max_theta_error = 0.0;
    bool converged = true;
};

struct Draw {
    std::vector<long long> coordinates; // integer coefficients in the basis
    std::vector<StepDiagnostics> steps;  // in sampling order (last coordinate first)
};

// Law of the last coordinate of x ~ exp(-<G(x - y), x - y>) over [floor(y_r) - l, ceil(y_r) + l].
CoordinateLaw coordinate_distribution(const linalg::SymmetricMatrix& gram, std::span<const double> y, int l,
                                      double eps_local, std::uint64_t seed, const core::ThetaOptions& options = {});

class Sampler {
public:
    explicit Sampler(SamplerConfig config, core::ThetaOptions options = {});

    const SamplerConfig& config() const noexcept { return config_; }
    int window() const noexcept { return l_; }
    double window_tail_bound() const noexcept { return tail_; }
    double step_eps() const noexcept { return eps_local_; }

    // Draw number `index`; its randomness derives from (seed, index) only.
    Draw draw(std::uint64_t index) const;
    std::vector<Draw> draw_many(std::size_t count) const;

private:
    struct Step {
        linalg::Vector mu;       // G_{r-1}^{-1} g
        double normal_sq = 0.0;  // G_rr - g^T mu
        core::ShiftedThetaEvaluator theta;
    };

    CoordinateLaw law(const Step& step, std::span<const double> y, std::uint64_t seed) const;

    SamplerConfig config_;
    core::ThetaOptions options_;
    int l_ = 1;
    double tail_ = 0.0;
    double eps_local_ = 0.0;
    std::vector<Step> steps_; // steps_[r - 1] handles prefix size r
};

Draw sample(const SamplerConfig& config, const core::ThetaOptions& options = {});
std::vector<Draw> sample_many(const SamplerConfig& config, std::size_t count, const core::ThetaOptions& options = {});

// exp{dist^2(v, Lambda)}, an upper bound on Theta_Lambda(0) / Theta_Lambda(v).
double banaszczyk_ratio_bound(const lattice::LatticeBasis& basis, std::span<const double> v,
                              const oracle::OracleCaps& caps = {});

} // namespace theta::sampler
