// theta-cli: theta sums, short-vector detection, distance intervals and discrete Gaussian sampling.
//
// Exit codes: 0 success, 1 failed verification or internal error, 2 invalid input,
// 3 no supported regime (or an enumeration cap), 4 Monte Carlo non-convergence.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "theta/errors.hpp"
#include "theta/io.hpp"
#include "theta/lattice.hpp"
#include "theta/rng.hpp"
#include "theta/sampler.hpp"
#include "theta/theta.hpp"
#include "theta/verify.hpp"

namespace {

using theta::io::Json;

enum Exit : int { ok = 0, failed = 1, invalid = 2, unsupported = 3, not_converged = 4 };

struct Common {
    double eps = 0.05;
    std::uint64_t seed = 0;
    double conf = 0.95;
    double gamma = 2.0;
    std::string backend = "auto";
    std::size_t max_evals = 4'000'000;
    bool half_window = false;

    theta::core::ThetaOptions options() const
    {
        theta::core::ThetaOptions o;
        o.gamma = gamma;
        o.accept_half_window = half_window;
        o.backend = theta::integrator::backend_from_string(backend);
        o.max_evals = max_evals;
        o.conf = conf;
        return o;
    }
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--eps", c.eps, "Relative error target in (0, 1]")->capture_default_str();
    cmd->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    cmd->add_option("--conf", c.conf, "Confidence level of reported errors")->capture_default_str();
    cmd->add_option("--backend", c.backend, "Integrator backend")
        ->check(CLI::IsMember({"auto", "direct", "walk"}))
        ->capture_default_str();
    cmd->add_option("--max-evals", c.max_evals, "Integrand evaluation budget")->capture_default_str();
}

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

Json error_json(std::string_view kind, std::string_view message)
{
    return Json{{"error", std::string(kind)}, {"message", std::string(message)}};
}

int converged_exit(bool converged) { return converged ? Exit::ok : Exit::not_converged; }

int run_theta(const std::string& matrix_path, const std::optional<std::string>& extra_path, bool shifted,
              const std::string& regime_name, const Common& c)
{
    auto b = theta::io::symmetric_from_json(theta::io::read_json_file(matrix_path));
    const std::size_t n = b.n();
    theta::linalg::Vector vec = extra_path ? theta::io::vector_from_json(theta::io::read_json_file(*extra_path))
                                           : theta::linalg::Vector(n, 0.0);
    const auto inst = shifted ? theta::core::make_shifted_instance(std::move(b), std::move(vec), c.eps, c.seed)
                              : theta::core::make_sum_instance(std::move(b), std::move(vec), c.eps, c.seed);
    const auto options = c.options();

    theta::core::ThetaResult result;
    if (regime_name == "auto") {
        const auto report = theta::core::select_regime(inst, options);
        if (report.regime == theta::core::Regime::unsupported) {
            auto j = error_json("regime_unsupported", report.detail);
            j["report"] = theta::io::to_json(report);
            emit(j);
            return Exit::unsupported;
        }
        result = theta::core::evaluate(inst, options);
    } else {
        switch (theta::core::regime_from_string(regime_name)) {
        case theta::core::Regime::integral: result = theta::core::theta_sum(inst, options); break;
        case theta::core::Regime::reciprocal: result = theta::core::theta_shifted(inst, options); break;
        case theta::core::Regime::smooth: result = theta::core::theta_smooth(inst, options); break;
        case theta::core::Regime::direct_oracle: result = theta::core::theta_direct(inst, options); break;
        case theta::core::Regime::unsupported: throw theta::ValidationError("UNSUPPORTED is not a computable regime");
        }
    }
    emit(theta::io::to_json(result, c.conf));
    return converged_exit(result.estimate.converged);
}

int run_subspace(const std::string& path, std::optional<double> delta, const Common& c)
{
    auto file = theta::io::subspace_from_json(theta::io::read_json_file(path));
    const double ln_n = std::log(double(file.a_int.cols()));
    theta::lattice::SubspaceInstance inst;
    double d = 0.0;
    if (delta) {
        d = *delta;
        inst = theta::lattice::SubspaceInstance::from_delta(std::move(file.a_int), d);
    } else {
        if (!file.s || !file.t) throw theta::ValidationError("subspace file needs 's' and 't' unless --delta is given");
        d = *file.s / ln_n - 0.5;
        inst = theta::lattice::SubspaceInstance::make(std::move(file.a_int), *file.s, *file.t);
    }
    const auto report = theta::lattice::short_vector_test(inst, d, c.eps, c.seed, c.options());
    auto j = theta::io::to_json(report, inst, c.conf);
    j["delta"] = d;
    emit(j);
    return converged_exit(report.result.theta.estimate.converged);
}

int run_distance(const std::string& basis_path, const std::string& v_path, double tau, const Common& c)
{
    const auto basis = theta::io::lattice_from_json(theta::io::read_json_file(basis_path));
    const auto v = theta::io::vector_from_json(theta::io::read_json_file(v_path));
    const auto bounds = theta::lattice::distance_interval(basis, v, tau, c.eps, c.seed, c.options());
    emit(theta::io::to_json(bounds, c.conf));
    return converged_exit(bounds.lattice_theta.estimate.converged);
}

int run_sample(const std::string& basis_path, const std::string& v_path, std::size_t count,
               const std::optional<std::string>& out_path, const std::optional<std::string>& sidecar_path,
               const Common& c)
{
    auto basis = theta::io::lattice_from_json(theta::io::read_json_file(basis_path));
    auto v = theta::io::vector_from_json(theta::io::read_json_file(v_path));
    auto config = theta::sampler::SamplerConfig::make(std::move(basis), std::move(v), c.eps, c.seed);
    auto options = c.options();
    options.threads = 1;
    const theta::sampler::Sampler sampler(std::move(config), options);
    std::vector<theta::sampler::Draw> draws(count);
    theta::parallel_for(count, theta::default_thread_count(), [&](std::size_t i) { draws[i] = sampler.draw(i); });

    std::string csv;
    for (const auto& draw : draws) {
        for (std::size_t i = 0; i < draw.coordinates.size(); ++i) {
            if (i > 0) csv += ',';
            csv += std::to_string(draw.coordinates[i]);
        }
        csv += '\n';
    }
    if (out_path) {
        std::ofstream out(*out_path, std::ios::binary);
        if (!out) throw theta::ValidationError("cannot write " + *out_path);
        out << csv;
    } else {
        std::cout << csv;
    }
    const auto side_target = sidecar_path ? sidecar_path : (out_path ? std::optional(*out_path + ".json") : std::nullopt);
    if (side_target) {
        std::ofstream side(*side_target, std::ios::binary);
        if (!side) throw theta::ValidationError("cannot write " + *side_target);
        side << theta::io::sample_sidecar(sampler, draws).dump(2) << '\n';
    }
    return Exit::ok;
}

int run_verify(const std::string& suite, std::uint64_t seed)
{
    const auto report = theta::verify::run_suite(suite, seed);
    Json checks = Json::array();
    for (const auto& check : report.checks)
        checks.push_back(Json{{"name", check.name},
                              {"passed", check.passed},
                              {"measured", check.measured},
                              {"threshold", check.threshold}});
    emit(Json{{"suite", report.suite}, {"passed", report.passed()}, {"checks", std::move(checks)}});
    return report.passed() ? Exit::ok : Exit::failed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multivariate theta sums and their lattice applications"};
    app.require_subcommand(1);

    Common common;
    std::string matrix_path, vector_path, basis_path, regime = "auto", suite;
    std::optional<std::string> b_path, out_path, sidecar_path;
    std::optional<double> delta;
    double tau = 1.0;
    std::size_t count = 1;

    auto* theta_cmd = app.add_subcommand("theta", "sum_x exp(-<Bx,x>) cos<b,x>");
    theta_cmd->add_option("matrix", matrix_path, "Symmetric matrix JSON")->required();
    theta_cmd->add_option("--b", b_path, "Phase vector JSON (default 0)");
    theta_cmd->add_option("--regime", regime, "auto, INTEGRAL, SMOOTH or DIRECT_ORACLE")
        ->check(CLI::IsMember({"auto", "INTEGRAL", "SMOOTH", "DIRECT_ORACLE"}))
        ->capture_default_str();
    theta_cmd->add_option("--gamma", common.gamma, "Smooth-range exponent")->capture_default_str();
    theta_cmd->add_flag("--half-window", common.half_window, "Accept the wider /2 integral window");
    add_common(theta_cmd, common);

    auto* shifted_cmd = app.add_subcommand("theta-shifted", "sum_x exp(-<B(x-y),x-y>)");
    shifted_cmd->add_option("matrix", matrix_path, "Symmetric matrix JSON")->required();
    shifted_cmd->add_option("--y", vector_path, "Shift vector JSON")->required();
    shifted_cmd->add_option("--regime", regime, "auto, RECIPROCAL, SMOOTH or DIRECT_ORACLE")
        ->check(CLI::IsMember({"auto", "RECIPROCAL", "SMOOTH", "DIRECT_ORACLE"}))
        ->capture_default_str();
    shifted_cmd->add_option("--gamma", common.gamma, "Smooth-range exponent")->capture_default_str();
    shifted_cmd->add_flag("--half-window", common.half_window, "Accept the wider /2 integral window");
    add_common(shifted_cmd, common);

    auto* subspace_cmd = app.add_subcommand("subspace", "Short integer vectors in ker A");
    subspace_cmd->add_option("file", matrix_path, "Subspace JSON {A, s, t}")->required();
    subspace_cmd->add_option("--delta", delta, "Sets s = (1/2 + delta) ln n and t = e^s / 5");
    add_common(subspace_cmd, common);

    auto* distance_cmd = app.add_subcommand("distance", "Interval for dist(v, Lambda) when Z^n is inside Lambda");
    distance_cmd->add_option("basis", basis_path, "Lattice JSON")->required();
    distance_cmd->add_option("--v", vector_path, "Target point JSON")->required();
    distance_cmd->add_option("--tau", tau, "Scale in (0, 1]")->capture_default_str();
    add_common(distance_cmd, common);

    auto* sample_cmd = app.add_subcommand("sample", "Discrete Gaussian draws over a lattice");
    sample_cmd->add_option("basis", basis_path, "Lattice JSON")->required();
    sample_cmd->add_option("--v", vector_path, "Target point JSON")->required();
    sample_cmd->add_option("--count", count, "Number of draws")->capture_default_str();
    sample_cmd->add_option("--out", out_path, "CSV output path (default stdout)");
    sample_cmd->add_option("--sidecar", sidecar_path, "Diagnostics JSON path (default <out>.json)");
    add_common(sample_cmd, common);

    auto* verify_cmd = app.add_subcommand("verify", "Run a self-check suite");
    verify_cmd->add_option("suite", suite, "Suite name or 'all'")->required();
    verify_cmd->add_option("--seed", common.seed, "Seed of the random instances")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::invalid;
    }

    try {
        if (!(common.eps > 0.0 && common.eps <= 1.0)) throw theta::ValidationError("--eps must lie in (0, 1]");
        if (!(common.conf > 0.0 && common.conf < 1.0)) throw theta::ValidationError("--conf must lie in (0, 1)");
        if (theta_cmd->parsed()) return run_theta(matrix_path, b_path, false, regime, common);
        if (shifted_cmd->parsed()) return run_theta(matrix_path, vector_path, true, regime, common);
        if (subspace_cmd->parsed()) return run_subspace(matrix_path, delta, common);
        if (distance_cmd->parsed()) return run_distance(basis_path, vector_path, tau, common);
        if (sample_cmd->parsed()) return run_sample(basis_path, vector_path, count, out_path, sidecar_path, common);
        if (verify_cmd->parsed()) return run_verify(suite, common.seed);
    } catch (const theta::ValidationError& e) {
        emit(error_json("validation", e.what()));
        return Exit::invalid;
    } catch (const theta::RegimeError& e) {
        emit(error_json("regime_unsupported", e.what()));
        return Exit::unsupported;
    } catch (const theta::CapError& e) {
        emit(error_json("cap_exceeded", e.what()));
        return Exit::unsupported;
    } catch (const theta::ConvergenceError& e) {
        emit(error_json("non_convergence", e.what()));
        return Exit::not_converged;
    } catch (const std::exception& e) {
        emit(error_json("internal", e.what()));
        return Exit::failed;
    }
    return Exit::failed;
}
