#include "theta/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "theta/errors.hpp"
#include "theta/rng.hpp"

namespace theta::oracle {

namespace {

void check_ball_args(std::size_t n, int k)
{
    if (n < 1) throw ValidationError("ball enumeration needs n >= 1");
    if (k < 0) throw ValidationError("ball enumeration needs k >= 0");
}

void check_count_bound(std::size_t n, int k, double count)
{
    if (std::log(count) > ball_count_log_bound(n, k) + 1e-12)
        throw InternalError("ball point count " + std::to_string(count) + " exceeds (2n+2)^k");
}

// Streams every w in Z^n with |w|^2 <= k through sparse depth-first search on the support,
// accumulating exp(-(Q(w) - 2<d,w>)) * cos(<b,w>) with Q(w) = <Bw,w> updated incrementally.
class BallSummer {
public:
    BallSummer(const linalg::SymmetricMatrix& b, std::span<const double> phases, std::span<const double> linear)
        : b_(b), phases_(phases), linear_(linear)
    {
    }

    struct Partial {
        double sum = 0.0;
        std::uint64_t count = 0;
    };

    // Points whose first nonzero coordinate is `first`.
    Partial sum_from(std::size_t first, int k) const
    {
        Partial out;
        std::vector<std::size_t> idx;
        std::vector<int> val;
        idx.reserve(static_cast<std::size_t>(k) + 1);
        val.reserve(static_cast<std::size_t>(k) + 1);
        visit_position(first, k, 0.0, 0.0, idx, val, out);
        return out;
    }

private:
    void visit_position(std::size_t p, int remaining, double q, double phase, std::vector<std::size_t>& idx,
                        std::vector<int>& val, Partial& out) const
    {
        const std::size_t n = b_.n();
        double cross = 0.0;
        for (std::size_t a = 0; a < idx.size(); ++a) cross += b_(p, idx[a]) * val[a];
        const double lin = linear_.empty() ? 0.0 : linear_[p];
        const double ph = phases_.empty() ? 0.0 : phases_[p];
        for (int mag = 1; mag * mag <= remaining; ++mag) {
            for (int sign : {1, -1}) {
                const int v = sign * mag;
                const double q2 = q + v * v * b_(p, p) + 2.0 * v * cross - 2.0 * v * lin;
                const double phase2 = phase + v * ph;
                out.sum += std::exp(-q2) * (phases_.empty() ? 1.0 : std::cos(phase2));
                ++out.count;
                const int rest = remaining - mag * mag;
                if (rest > 0 && p + 1 < n) {
                    idx.push_back(p);
                    val.push_back(v);
                    for (std::size_t next = p + 1; next < n; ++next) visit_position(next, rest, q2, phase2, idx, val, out);
                    idx.pop_back();
                    val.pop_back();
                }
            }
        }
    }

    const linalg::SymmetricMatrix& b_;
    std::span<const double> phases_;
    std::span<const double> linear_;
};

BruteThetaResult stream_ball(const linalg::SymmetricMatrix& b, std::span<const double> phases,
                             std::span<const double> linear, int k, const OracleCaps& caps)
{
    const std::size_t n = b.n();
    check_ball_args(n, k);
    const double expected = ball_count(n, k);
    if (expected > static_cast<double>(caps.max_streamed_points))
        throw CapError("theta enumeration over |x|^2 <= " + std::to_string(k) + " in dimension " + std::to_string(n) +
                       " needs " + std::to_string(expected) + " points, above the cap of " +
                       std::to_string(caps.max_streamed_points));
    BallSummer summer(b, phases, linear);
    std::vector<BallSummer::Partial> parts(n);
    parallel_for(n, default_thread_count(), [&](std::size_t p) { parts[p] = summer.sum_from(p, k); });
    BruteThetaResult out;
    out.k = k;
    out.value = 1.0;
    out.points = 1;
    for (const auto& part : parts) {
        out.value += part.sum;
        out.points += part.count;
    }
    check_count_bound(n, k, static_cast<double>(out.points));
    return out;
}

void check_lower_bound(const linalg::SymmetricMatrix& b, double s_tail)
{
    if (!(s_tail > 0.0))
        throw ValidationError("brute theta: no certified tail regime without a positive lower bound s_tail");
    const auto bounds = linalg::spectral_bounds(b);
    if (bounds.lambda_min < s_tail - 1e-10 * (1.0 + std::abs(s_tail)))
        throw ValidationError("brute theta: s_tail I <= B fails (lambda_min = " + std::to_string(bounds.lambda_min) +
                              ")");
}

double log_tilted_factor(double s, double tau, double delta)
{
    // sum_xi exp(-s (xi - delta)^2 + tau xi^2), summed outward from the maximiser.
    const double a = s - tau;
    const double peak = std::round(s * delta / a);
    auto exponent = [&](double xi) { return -s * (xi - delta) * (xi - delta) + tau * xi * xi; };
    const double top = exponent(peak);
    double sum = 1.0;
    for (int dir : {1, -1}) {
        for (double xi = peak + dir;; xi += dir) {
            const double term = std::exp(exponent(xi) - top);
            sum += term;
            if (term < 1e-18 * sum && (xi - peak) * dir > 2.0) break;
        }
    }
    return top + std::log(sum);
}

double theorem_smooth_tail(std::size_t n, double s, int k)
{
    // 60 n^{(1 - gamma) k} with gamma = s / ln n > 1
    if (n < 2) return std::numeric_limits<double>::infinity();
    const double ln_n = std::log(double(n));
    if (s <= ln_n) return std::numeric_limits<double>::infinity();
    return 60.0 * std::exp((ln_n - s) * k);
}

double lemma_shell_tail(std::size_t n, double s, int k)
{
    // e^{-k} when 4 n / e >= k >= 30 n e^{-s}
    const double nd = double(n);
    if (k >= 30.0 * nd * std::exp(-s) && k <= 4.0 * nd / std::numbers::e) return std::exp(-double(k));
    return std::numeric_limits<double>::infinity();
}

} // namespace

double ball_count(std::size_t n, int k)
{
    check_ball_args(n, k);
    // ways[r] = number of vectors over the coordinates processed so far with squared norm exactly r
    std::vector<double> ways(static_cast<std::size_t>(k) + 1, 0.0);
    ways[0] = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> next(ways.size(), 0.0);
        for (int r = 0; r <= k; ++r) {
            if (ways[r] == 0.0) continue;
            next[r] += ways[r];
            for (int v = 1; r + v * v <= k; ++v) next[r + v * v] += 2.0 * ways[r];
        }
        ways = std::move(next);
    }
    double total = 0.0;
    for (double w : ways) total += w;
    return total;
}

double ball_count_log_bound(std::size_t n, int k) { return k * std::log(2.0 * double(n) + 2.0); }

BallEnumeration enumerate_ball(std::size_t n, int k, const OracleCaps& caps)
{
    check_ball_args(n, k);
    const double expected = ball_count(n, k);
    if (expected > static_cast<double>(caps.max_points))
        throw CapError("ball enumeration would produce " + std::to_string(expected) + " points, above the cap of " +
                       std::to_string(caps.max_points));
    BallEnumeration out{n, k, {}};
    out.points.reserve(static_cast<std::size_t>(expected));
    IntPoint x(n, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t j, int remaining) {
        if (j == n) {
            out.points.push_back(x);
            return;
        }
        const int r = static_cast<int>(std::floor(std::sqrt(double(remaining)) + 1e-12));
        for (int v = -r; v <= r; ++v) {
            x[j] = v;
            rec(j + 1, remaining - v * v);
        }
        x[j] = 0;
    };
    rec(0, k);
    check_count_bound(n, k, static_cast<double>(out.points.size()));
    return out;
}

double tilted_tail_bound(double s, int k, std::span<const double> delta)
{
    if (!(s > 0.0)) throw ValidationError("tilted_tail_bound: s must be positive");
    std::map<double, int> groups;
    for (double d : delta) ++groups[d];
    auto objective = [&](double tau) {
        double total = -tau * k;
        for (const auto& [d, count] : groups) total += count * log_tilted_factor(s, tau, d);
        return total;
    };
    // Convex in tau: golden-section search on [0, 0.999 s].
    double lo = 0.0, hi = 0.999 * s;
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 90; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = objective(x2);
        }
    }
    const double best = std::min({f1, f2, objective(0.0)});
    return std::exp(best);
}

BruteThetaResult brute_theta(const linalg::SymmetricMatrix& b, std::span<const double> phases, double s_tail, int k,
                             const OracleCaps& caps)
{
    const std::size_t n = b.n();
    if (!phases.empty() && phases.size() != n) throw ValidationError("brute_theta: phase vector has wrong length");
    check_lower_bound(b, s_tail);
    BruteThetaResult out = stream_ball(b, phases, {}, k, caps);
    // Omitted points have |x|^2 >= k + 1.
    const std::vector<double> zeros(n, 0.0);
    out.tail_bound = std::min({tilted_tail_bound(s_tail, k + 1, zeros), theorem_smooth_tail(n, s_tail, k + 1),
                               lemma_shell_tail(n, s_tail, k + 1)});
    return out;
}

BruteThetaResult brute_theta_shifted(const linalg::SymmetricMatrix& b, std::span<const double> y, double s_tail,
                                     int k, const OracleCaps& caps)
{
    const std::size_t n = b.n();
    if (y.size() != n) throw ValidationError("brute_theta_shifted: shift has wrong length");
    check_lower_bound(b, s_tail);
    // x = c + w, x - y = w - delta with delta = y - c.
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = y[i] - std::round(y[i]);
    const auto bd = linalg::multiply(b, delta);
    const double constant = linalg::dot(bd, delta);
    BruteThetaResult out = stream_ball(b, {}, bd, k, caps);
    out.value *= std::exp(-constant);
    out.tail_bound = tilted_tail_bound(s_tail, k + 1, delta);
    return out;
}

namespace {

template <class Compute>
BruteThetaResult grow_until(std::size_t n, double s_tail, double rel_tol, const OracleCaps& caps, Compute compute,
                            const std::function<double(int)>& tail_at)
{
    if (!(rel_tol > 0.0)) throw ValidationError("brute theta: rel_tol must be positive");
    BruteThetaResult current = compute(1);
    int k = 1;
    for (int attempt = 0; attempt < 200; ++attempt) {
        if (current.tail_bound <= rel_tol * std::abs(current.value)) return current;
        const double target = 0.5 * rel_tol * std::abs(current.value);
        int next = k + 1;
        while (tail_at(next) > target && next < k + 400) ++next;
        if (ball_count(n, next) > static_cast<double>(caps.max_streamed_points))
            throw CapError("brute theta: reaching relative tail " + std::to_string(rel_tol) +
                           " needs an enumeration beyond the cap (s_tail = " + std::to_string(s_tail) + ")");
        k = next;
        current = compute(k);
    }
    throw ConvergenceError("brute theta: tail did not shrink below the requested tolerance");
}

} // namespace

BruteThetaResult brute_theta_auto(const linalg::SymmetricMatrix& b, std::span<const double> phases, double rel_tol,
                                  const OracleCaps& caps)
{
    const double s_tail = linalg::spectral_bounds(b).lambda_min * (1.0 - 1e-12);
    const std::size_t n = b.n();
    const std::vector<double> zeros(n, 0.0);
    return grow_until(
        n, s_tail, rel_tol, caps, [&](int k) { return brute_theta(b, phases, s_tail, k, caps); },
        [&](int k) {
            return std::min({tilted_tail_bound(s_tail, k + 1, zeros), theorem_smooth_tail(n, s_tail, k + 1),
                             lemma_shell_tail(n, s_tail, k + 1)});
        });
}

BruteThetaResult brute_theta_shifted_auto(const linalg::SymmetricMatrix& b, std::span<const double> y,
                                          double rel_tol, const OracleCaps& caps)
{
    const double s_tail = linalg::spectral_bounds(b).lambda_min * (1.0 - 1e-12);
    const std::size_t n = b.n();
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = y[i] - std::round(y[i]);
    return grow_until(
        n, s_tail, rel_tol, caps, [&](int k) { return brute_theta_shifted(b, y, s_tail, k, caps); },
        [&](int k) { return tilted_tail_bound(s_tail, k + 1, delta); });
}

BruteThetaResult brute_kernel_theta(const linalg::RectMatrix& a_int, double s, int k, const OracleCaps& caps)
{
    const std::size_t n = a_int.cols();
    if (!(s > 0.0)) throw ValidationError("brute_kernel_theta: s must be positive");
    const auto ball = enumerate_ball(n, k, caps);
    BruteThetaResult out;
    out.k = k;
    out.points = ball.points.size();
    for (const auto& x : ball.points) {
        bool in_kernel = true;
        for (std::size_t r = 0; r < a_int.rows() && in_kernel; ++r) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += a_int(r, j) * double(x[j]);
            in_kernel = std::abs(acc) < 1e-9;
        }
        if (!in_kernel) continue;
        double sq = 0.0;
        for (long long v : x) sq += double(v) * double(v);
        out.value += std::exp(-s * sq);
    }
    out.tail_bound = tilted_tail_bound(s, k + 1, std::vector<double>(n, 0.0));
    return out;
}

linalg::Vector basis_coordinates(const linalg::RectMatrix& basis, std::span<const double> v)
{
    if (basis.rows() != basis.cols()) throw ValidationError("basis must be square (n vectors in R^n)");
    if (v.size() != basis.cols()) throw ValidationError("target point has wrong dimension");
    return linalg::solve(basis.transposed(), v);
}

double brute_distance(const linalg::RectMatrix& basis, std::span<const double> v, const OracleCaps& caps)
{
    const std::size_t n = basis.rows();
    if (n > caps.max_distance_dim)
        throw CapError("brute_distance supports n <= " + std::to_string(caps.max_distance_dim));
    const auto eta = basis_coordinates(basis, v);
    const auto gram = linalg::gram_of_rows(basis);

    // Upper-triangular R with gram = R^T R.
    linalg::RectMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double diag = gram(i, i);
        for (std::size_t k = 0; k < i; ++k) diag -= r(k, i) * r(k, i);
        if (!(diag > 0.0)) throw ValidationError("brute_distance: basis vectors are linearly dependent");
        r(i, i) = std::sqrt(diag);
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = gram(i, j);
            for (std::size_t k = 0; k < i; ++k) s -= r(k, i) * r(k, j);
            r(i, j) = s / r(i, i);
        }
    }

    auto distance_sq = [&](const std::vector<double>& x) {
        double total = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            double comp = -v[c];
            for (std::size_t i = 0; i < n; ++i) comp += x[i] * basis(i, c);
            total += comp * comp;
        }
        return total;
    };

    std::vector<double> x(n), best(n);
    for (std::size_t i = 0; i < n; ++i) best[i] = std::round(eta[i]);
    double best_sq = distance_sq(best);
    double radius_sq = best_sq * (1.0 + 1e-9) + 1e-12;

    std::size_t nodes = 0;
    std::function<void(std::size_t, double)> rec = [&](std::size_t level, double partial) {
        // level counts down from n; coordinate index i = level - 1
        if (level == 0) {
            const double d = distance_sq(x);
            if (d < best_sq) {
                best_sq = d;
                best = x;
                radius_sq = std::min(radius_sq, d * (1.0 + 1e-9) + 1e-12);
            }
            return;
        }
        const std::size_t i = level - 1;
        double centre = eta[i];
        for (std::size_t j = i + 1; j < n; ++j) centre -= r(i, j) / r(i, i) * (x[j] - eta[j]);
        const double room = radius_sq - partial;
        if (room < 0.0) return;
        const double half = std::sqrt(room) / r(i, i);
        for (double xi = std::ceil(centre - half); xi <= std::floor(centre + half); xi += 1.0) {
            if (++nodes > caps.max_points) throw CapError("brute_distance: enumeration exceeded the node cap");
            x[i] = xi;
            const double t = r(i, i) * (xi - centre);
            rec(level - 1, partial + t * t);
        }
    };
    rec(n, 0.0);
    return std::sqrt(best_sq);
}

double GaussianTable::probability_of(std::span<const long long> point) const
{
    for (std::size_t i = 0; i < points.size(); ++i)
        if (std::equal(points[i].begin(), points[i].end(), point.begin(), point.end())) return probabilities[i];
    return 0.0;
}

GaussianTable brute_gaussian_distribution(const linalg::RectMatrix& basis, std::span<const double> v, int l,
                                          const OracleCaps& caps)
{
    const std::size_t n = basis.rows();
    if (n > caps.max_gaussian_dim)
        throw CapError("brute_gaussian_distribution supports n <= " + std::to_string(caps.max_gaussian_dim));
    if (l < 0) throw ValidationError("brute_gaussian_distribution: window must be nonnegative");
    const auto eta = basis_coordinates(basis, v);
    const auto gram = linalg::gram_of_rows(basis);

    std::vector<long long> lo(n), hi(n);
    double cells = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = static_cast<long long>(std::floor(eta[i])) - l;
        hi[i] = static_cast<long long>(std::ceil(eta[i])) + l;
        cells *= double(hi[i] - lo[i] + 1);
    }
    if (cells > static_cast<double>(caps.max_points)) throw CapError("brute_gaussian_distribution: box too large");

    GaussianTable table;
    std::vector<double> log_weights;
    IntPoint x(lo);
    std::vector<double> diff(n);
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) diff[i] = double(x[i]) - eta[i];
        table.points.push_back(x);
        log_weights.push_back(-linalg::quadratic_form(gram, diff));
        std::size_t i = 0;
        while (i < n && x[i] == hi[i]) {
            x[i] = lo[i];
            ++i;
        }
        if (i == n) break;
        ++x[i];
    }
    const double top = *std::max_element(log_weights.begin(), log_weights.end());
    double total = 0.0;
    table.probabilities.resize(log_weights.size());
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        table.probabilities[i] = std::exp(log_weights[i] - top);
        total += table.probabilities[i];
    }
    for (double& p : table.probabilities) p /= total;
    return table;
}

} // namespace theta::oracle
