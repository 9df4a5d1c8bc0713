#pragma once

// Self-checks of the identities and bounds the library relies on, runnable from the CLI.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace theta::verify {

struct Check {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;

    bool passed() const;
};

// jacobi, log-concavity, oracle, reciprocity, distance, sampler, regimes
const std::vector<std::string>& suite_names();

// "all" runs every suite. Throws ValidationError for an unknown name.
SuiteReport run_suite(std::string_view name, std::uint64_t seed = 0);

// log of Theta(tau I, y) / Theta(tau I) for n = 1, from the dual series
// sum_k e^{-pi^2 k^2 / tau} cos(2 pi k y), accurate even when the ratio is within 1e-40 of 1.
double log_shift_ratio_1d(double tau, double y);

} // namespace theta::verify
