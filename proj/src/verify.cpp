#include "theta/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "theta/errors.hpp"
#include "theta/integrand.hpp"
#include "theta/jacobi.hpp"
#include "theta/oracle.hpp"
#include "theta/rng.hpp"
#include "theta/sampler.hpp"
#include "theta/theta.hpp"

namespace theta::verify {

namespace {

constexpr double kPi = std::numbers::pi;

class Draws {
public:
    explicit Draws(std::uint64_t seed) : rng_(seed) {}
    double uniform(double a, double b) { return a + (b - a) * static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    int integer(int a, int b) { return a + static_cast<int>(rng_() % static_cast<std::uint64_t>(b - a + 1)); }
    double normal()
    {
        const double u = uniform(0.0, 1.0), w = uniform(0.0, 1.0);
        return std::sqrt(-2.0 * std::log1p(-u)) * std::cos(2.0 * kPi * w);
    }

private:
    std::mt19937_64 rng_;
};

Check at_most(std::string name, double measured, double threshold)
{
    return {std::move(name), measured <= threshold, measured, threshold};
}

linalg::SymmetricMatrix random_spd(Draws& rng, std::size_t n, double lo, double hi)
{
    // Q diag Q^T with Q from Gram-Schmidt on a Gaussian matrix.
    std::vector<linalg::Vector> q;
    while (q.size() < n) {
        linalg::Vector v(n);
        for (double& x : v) x = rng.normal();
        for (const auto& u : q) {
            const double c = linalg::dot(u, v);
            for (std::size_t i = 0; i < n; ++i) v[i] -= c * u[i];
        }
        const double norm = linalg::norm(v);
        if (norm < 1e-6) continue;
        for (double& x : v) x /= norm;
        q.push_back(std::move(v));
    }
    linalg::Vector lambda(n);
    for (double& l : lambda) l = rng.uniform(lo, hi);
    linalg::SymmetricMatrix b(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += q[k][i] * lambda[k] * q[k][j];
            b.set(i, j, s);
        }
    return b;
}

SuiteReport jacobi_suite()
{
    SuiteReport out{"jacobi", {}};
    for (double q : {0.1, 0.3, std::exp(-3.0)})
        for (double angle : {0.0, 1.0, kPi / 2.0, kPi}) {
            const double lhs = jacobi::triple_product_lhs(q, angle, {60});
            const double rhs = jacobi::triple_product_series(q, angle, 60);
            out.checks.push_back(at_most("triple product q=" + std::to_string(q) + " angle=" + std::to_string(angle),
                                         std::abs(lhs - rhs), 1e-12));
        }
    return out;
}

SuiteReport log_concavity_suite(std::uint64_t seed)
{
    SuiteReport out{"log-concavity", {}};
    Draws rng(seed);
    double worst = -1e300;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = static_cast<std::size_t>(rng.integer(1, 4));
        const std::size_t m = static_cast<std::size_t>(rng.integer(1, 3));
        const double s = rng.uniform(1.0, 4.0);
        linalg::RectMatrix a(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.normal();
        const double q = std::exp(-s);
        const double gram_norm = std::pow(linalg::operator_norm(a), 2);
        const double scale = std::sqrt(rng.uniform(0.0, 1.0) * 0.5 / (gram_norm * integrand::admissibility_series(q)));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) *= scale;
        std::vector<double> phases(n);
        for (double& p : phases) p = rng.uniform(-kPi, kPi);
        const integrand::FactoredForm form(a, phases, s, jacobi::truncation_order(static_cast<int>(n), 0.05, s));

        std::vector<double> t0(m), d(m);
        for (double& x : t0) x = 2.0 * rng.normal();
        for (double& x : d) x = rng.normal();
        const double dn = linalg::norm(d);
        for (double& x : d) x /= dn;
        const double h = 1e-3;
        auto at = [&](double tau) {
            std::vector<double> t(m);
            for (std::size_t i = 0; i < m; ++i) t[i] = t0[i] + tau * d[i];
            return integrand::log_density(form, t).log_g;
        };
        worst = std::max(worst, (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h));
    }
    out.checks.push_back(at_most("max second difference of log G on random lines", worst, 1e-6));

    double excess = -1e300;
    for (int trial = 0; trial < 10000; ++trial) {
        const double q = rng.uniform(0.0, 0.95);
        const double alpha = rng.uniform(-3.0, 3.0), beta = rng.uniform(-kPi, kPi), tau = rng.uniform(-5.0, 5.0);
        const double curvature = alpha * alpha * integrand::log_factor_curvature(q, alpha * tau + beta);
        excess = std::max(excess, curvature - alpha * alpha * integrand::log_factor_curvature_bound(q));
    }
    out.checks.push_back(at_most("curvature minus 2 alpha^2 q / (1-q)^2", excess, 1e-9));
    return out;
}

SuiteReport oracle_suite()
{
    SuiteReport out{"oracle", {}};
    const struct {
        std::size_t n;
        int k;
        double count;
    } cases[] = {{2, 1, 5}, {2, 2, 9}, {3, 4, 33}};
    for (const auto& c : cases) {
        const auto ball = oracle::enumerate_ball(c.n, c.k);
        out.checks.push_back(at_most("ball count n=" + std::to_string(c.n) + " k=" + std::to_string(c.k),
                                     std::abs(double(ball.points.size()) - c.count), 0.0));
    }
    double worst_count = 0.0;
    for (std::size_t n = 1; n <= 5; ++n)
        for (int k = 0; k <= 6; ++k)
            worst_count = std::max(worst_count, std::log(oracle::ball_count(n, k)) - oracle::ball_count_log_bound(n, k));
    out.checks.push_back(at_most("log count minus log (2n+2)^k", worst_count, 0.0));

    double worst_theta = -1e300;
    for (std::size_t n = 1; n <= 5; ++n)
        for (double s : {1.0, 2.0, 3.0, 5.0}) {
            const auto r = oracle::brute_theta_auto(linalg::SymmetricMatrix::identity(n, s), std::vector<double>(n, 0.0),
                                                    1e-12);
            const double bound = 2.0 * double(n) * std::exp(-s) / (1.0 - std::exp(-s));
            worst_theta = std::max(worst_theta, std::log(r.value + r.tail_bound) - bound);
        }
    out.checks.push_back(at_most("log Theta(sI) minus 2n e^-s / (1 - e^-s)", worst_theta, 0.0));
    return out;
}

SuiteReport reciprocity_suite(std::uint64_t seed)
{
    SuiteReport out{"reciprocity", {}};
    Draws rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = static_cast<std::size_t>(rng.integer(1, 3));
        const auto b = random_spd(rng, n, 1.0, 5.0);
        std::vector<double> y(n), phases(n);
        for (double& x : y) x = rng.uniform(-1.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) phases[i] = 2.0 * kPi * y[i];
        const auto inv = linalg::spd_inverse(b);
        const auto lhs = oracle::brute_theta_shifted_auto(b, y, 1e-14);
        const auto rhs = oracle::brute_theta_auto(kPi * kPi * inv.inverse, phases, 1e-14);
        const double scaled = std::exp(0.5 * double(n) * std::log(kPi) - 0.5 * inv.log_det) * rhs.value;
        worst = std::max(worst, std::abs(lhs.value - scaled) / lhs.value);
    }
    out.checks.push_back(at_most("relative gap between both sides of reciprocity", worst, 1e-10));
    return out;
}

SuiteReport distance_suite(std::uint64_t seed)
{
    SuiteReport out{"distance", {}};
    Draws rng(seed);
    double worst = -1e300;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.integer(1, 3);
        const double tau = rng.uniform(1e-3, 1.0);
        const double q = std::exp(-kPi * kPi / tau);
        double log_ratio = 0.0, d2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double y = rng.uniform(-2.0, 2.0);
            log_ratio += log_shift_ratio_1d(tau, y);
            d2 += std::pow(y - std::round(y), 2);
        }
        const double lo = -41.0 * q * d2, hi = -13.0 * q * d2;
        const double scale = std::max(1e-300, q * d2);
        worst = std::max({worst, (lo - log_ratio) / scale, (log_ratio - hi) / scale});
    }
    out.checks.push_back(at_most("two-sided shift bound, worst violation relative to q d^2", worst, 1e-9));

    double sandwich = -1e300;
    for (int i = 0; i <= 10000; ++i) {
        const double eta = -0.5 + double(i) / 10000.0;
        const double c = 1.0 - std::cos(2.0 * kPi * eta);
        sandwich = std::max({sandwich, 7.0 * eta * eta - c, c - 20.0 * eta * eta});
    }
    out.checks.push_back(at_most("cosine sandwich 7 eta^2 <= 1 - cos(2 pi eta) <= 20 eta^2", sandwich, 1e-15));
    return out;
}

SuiteReport sampler_suite()
{
    SuiteReport out{"sampler", {}};
    const int l = sampler::window_radius(1, 1.0, 1.0, 1e-6);
    const std::vector<double> zero{0.0};
    const auto law = sampler::coordinate_distribution(linalg::SymmetricMatrix::identity(1), zero, l, 1e-7, 0);
    const double theta = jacobi::theta_1d(1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < law.probabilities.size(); ++i) {
        const double xi = double(law.lo + static_cast<long long>(i));
        worst = std::max(worst, std::abs(law.probabilities[i] - std::exp(-xi * xi) / theta));
    }
    out.checks.push_back(at_most("coordinate law on Z at v = 0 vs exp(-xi^2) / theta", worst, 1e-9));

    const auto basis = linalg::RectMatrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    const std::vector<double> v{0.3, 0.7};
    const auto table = oracle::brute_gaussian_distribution(basis, v, l);
    const auto law2 = sampler::coordinate_distribution(linalg::SymmetricMatrix::identity(2), v, l, 1e-7, 0);
    double worst2 = 0.0;
    for (std::size_t i = 0; i < law2.probabilities.size(); ++i) {
        const long long alpha = law2.lo + static_cast<long long>(i);
        double marginal = 0.0;
        for (std::size_t p = 0; p < table.points.size(); ++p)
            if (table.points[p][1] == alpha) marginal += table.probabilities[p];
        worst2 = std::max(worst2, std::abs(law2.probabilities[i] - marginal));
    }
    out.checks.push_back(at_most("last-coordinate law on Z^2 vs enumerated marginal", worst2, 1e-6));
    return out;
}

SuiteReport regimes_suite()
{
    SuiteReport out{"regimes", {}};
    auto regime_of = [](linalg::SymmetricMatrix b, bool shifted) {
        const std::size_t n = b.n();
        const auto inst = shifted ? core::make_shifted_instance(std::move(b), linalg::Vector(n, 0.0), 0.05, 0)
                                  : core::make_sum_instance(std::move(b), {}, 0.05, 0);
        return core::select_regime(inst).regime;
    };
    auto expect = [&](std::string name, core::Regime got, core::Regime want) {
        out.checks.push_back({std::move(name), got == want, double(static_cast<int>(got)), double(static_cast<int>(want))});
    };
    expect("B = 3I, n = 10 is INTEGRAL", regime_of(linalg::SymmetricMatrix::identity(10, 3.0), false),
           core::Regime::integral);
    const std::vector<double> diag{3.0, 3.0 + std::exp(3.0) / 5.0};
    expect("diag(3, 3 + e^3/5) is INTEGRAL", regime_of(linalg::SymmetricMatrix::diagonal(diag), false),
           core::Regime::integral);
    expect("(pi^2 / 3.001) I shifted is RECIPROCAL",
           regime_of(linalg::SymmetricMatrix::identity(1, kPi * kPi / 3.001), true), core::Regime::reciprocal);
    return out;
}

} // namespace

bool SuiteReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"jacobi",   "log-concavity", "oracle", "reciprocity",
                                                "distance", "sampler",       "regimes"};
    return names;
}

SuiteReport run_suite(std::string_view name, std::uint64_t seed)
{
    if (name == "all") {
        SuiteReport all{"all", {}};
        for (const auto& suite : suite_names()) {
            auto report = run_suite(suite, seed);
            for (auto& c : report.checks) {
                c.name = suite + ": " + c.name;
                all.checks.push_back(std::move(c));
            }
        }
        return all;
    }
    if (name == "jacobi") return jacobi_suite();
    if (name == "log-concavity") return log_concavity_suite(derive_seed(seed, 1));
    if (name == "oracle") return oracle_suite();
    if (name == "reciprocity") return reciprocity_suite(derive_seed(seed, 2));
    if (name == "distance") return distance_suite(derive_seed(seed, 3));
    if (name == "sampler") return sampler_suite();
    if (name == "regimes") return regimes_suite();
    throw ValidationError("unknown verify suite '" + std::string(name) + "'");
}

double log_shift_ratio_1d(double tau, double y)
{
    double num = 0.0, den = 1.0;
    for (int k = 1;; ++k) {
        const double qk = std::exp(-kPi * kPi * double(k) * double(k) / tau);
        if (qk < 1e-300) break;
        num += 2.0 * qk * (std::cos(2.0 * kPi * double(k) * y) - 1.0);
        den += 2.0 * qk;
    }
    return std::log1p(num / den);
}

} // namespace theta::verify
