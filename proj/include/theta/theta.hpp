#pragma once

// Theta sums over Z^n:
//
//   b-mode  sum_x exp(-<Bx,x>) cos<b,x>
//   y-mode  sum_x exp(-<B(x-y),x-y>)
//
// evaluated by the log-concave integral representation, by reciprocity, by enumeration in the
// smooth range, or by brute force for tiny n, whichever regime the instance falls in.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "theta/integrand.hpp"
#include "theta/integrator.hpp"
#include "theta/linalg.hpp"
#include "theta/oracle.hpp"

namespace theta::core {

struct ThetaInstance {
    linalg::SymmetricMatrix b;
    linalg::Vector phases;              // b-mode phase vector (zeros allowed)
    std::optional<linalg::Vector> shift; // set for y-mode
    double eps = 0.05;
    std::uint64_t seed = 0;

    bool shifted() const noexcept { return shift.has_value(); }
};

ThetaInstance make_sum_instance(linalg::SymmetricMatrix b, linalg::Vector phases, double eps, std::uint64_t seed);
ThetaInstance make_shifted_instance(linalg::SymmetricMatrix b, linalg::Vector y, double eps, std::uint64_t seed);

enum class Regime { integral, reciprocal, smooth, direct_oracle, unsupported };

std::string_view to_string(Regime regime);
Regime regime_from_string(std::string_view name);

struct RegimeReport {
    Regime regime = Regime::unsupported;
    double s = 0.0;
    std::string detail;
};

struct ThetaOptions {
    double gamma = 2.0;
    // Accept lambda_max up to s + e^s/2 (1-e^-s)^2 (1-e^-2s) instead of the /4 window.
    bool accept_half_window = false;
    integrator::Backend backend = integrator::Backend::automatic;
    std::size_t max_evals = 4'000'000;
    double conf = 0.95;
    oracle::OracleCaps caps{};
    std::size_t direct_oracle_dim = 6;
    std::size_t threads = 0;
};

struct ThetaResult {
    // value is the theta value; rel_stderr is the Monte Carlo part of its relative error.
    integrator::Estimate estimate;
    RegimeReport regime;
    // Product truncation order, or the squared ball radius for enumeration regimes.
    int K = 0;
    double s = 0.0;
    // Deterministic relative error bound: product truncation or omitted enumeration tail.
    double truncation_rel_error = 0.0;

    // z(conf) * rel_stderr + truncation_rel_error
    double combined_rel_error(double conf) const;
};

// s + (e^s / 4) (1 - e^-s)^2 (1 - e^-2s), and the /2 variant.
double integral_window_upper(double s);
double half_window_upper(double s);

// e^{5 / (gamma - 1)}
double smooth_min_dimension(double gamma);

// 60 n^{(1 - gamma) k}
double tail_bound_smooth(std::size_t n, double gamma, int k);

// Smallest k >= 1 with 60 n^{(1 - gamma) k} <= eps / 4.
int smooth_radius(std::size_t n, double gamma, double eps);

RegimeReport select_regime(const ThetaInstance& inst, const ThetaOptions& options = {});

ThetaResult theta_sum(const ThetaInstance& inst, const ThetaOptions& options = {});
ThetaResult theta_shifted(const ThetaInstance& inst, const ThetaOptions& options = {});
ThetaResult theta_smooth(const ThetaInstance& inst, const ThetaOptions& options = {});
// Brute-force summation grown until the certified tail is below eps relative; needs n <= direct_oracle_dim.
ThetaResult theta_direct(const ThetaInstance& inst, const ThetaOptions& options = {});

// Runs select_regime and the matching computation; RegimeError when unsupported.
ThetaResult evaluate(const ThetaInstance& inst, const ThetaOptions& options = {});

// y-mode evaluator for one fixed form, prepared once and reused across many shifts.
class ShiftedThetaEvaluator {
public:
    ShiftedThetaEvaluator(const linalg::SymmetricMatrix& b, double eps, ThetaOptions options);

    std::size_t n() const noexcept { return n_; }
    const RegimeReport& regime() const noexcept { return regime_; }
    ThetaResult operator()(std::span<const double> y, std::uint64_t seed) const;

private:
    std::size_t n_;
    double eps_;
    ThetaOptions options_;
    RegimeReport regime_;
    linalg::SymmetricMatrix form_;    // the matrix summed in b-mode (pi^2 B^-1 for reciprocity)
    double log_scale_ = 0.0;          // log of pi^{n/2} det(B)^{-1/2}
    linalg::RectMatrix factor_;       // half-Gram factor of form_ - s I
    jacobi::TruncationOrder order_{1};
    linalg::SymmetricMatrix original_;
};

} // namespace theta::core
