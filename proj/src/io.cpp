#include "theta/io.hpp"

#include <cmath>
#include <fstream>

#include "theta/errors.hpp"

namespace theta::io {

namespace {

std::vector<double> row_of(const Json& row, const char* what)
{
    if (!row.is_array()) throw ValidationError(std::string(what) + ": each row must be an array of numbers");
    std::vector<double> out;
    out.reserve(row.size());
    for (const auto& x : row) {
        if (!x.is_number()) throw ValidationError(std::string(what) + ": entries must be numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<std::vector<double>> rows_of(const Json& j, const char* what)
{
    if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : j) rows.push_back(row_of(row, what));
    return rows;
}

std::size_t size_field(const Json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_number_unsigned())
        throw ValidationError(std::string("matrix field '") + key + "' must be a nonnegative integer");
    return j[key].get<std::size_t>();
}

// Row-major entries, either flat or as an array of rows.
std::vector<double> flat_entries(const Json& j, std::size_t rows, std::size_t cols)
{
    if (!j.is_array()) throw ValidationError("entries must be an array");
    std::vector<double> flat;
    flat.reserve(rows * cols);
    if (!j.empty() && j.front().is_array()) {
        const auto nested = rows_of(j, "entries");
        if (nested.size() != rows) throw ValidationError("entries has " + std::to_string(nested.size()) + " rows, expected " + std::to_string(rows));
        for (const auto& row : nested) {
            if (row.size() != cols) throw ValidationError("entries rows must have " + std::to_string(cols) + " values");
            flat.insert(flat.end(), row.begin(), row.end());
        }
    } else {
        flat = row_of(j, "entries");
        if (flat.size() != rows * cols)
            throw ValidationError("entries has " + std::to_string(flat.size()) + " values, expected " +
                                  std::to_string(rows * cols));
    }
    return flat;
}

Json number_or_null(double x)
{
    if (std::isfinite(x)) return x;
    return nullptr;
}

bool uses_integrator(core::Regime regime)
{
    return regime == core::Regime::integral || regime == core::Regime::reciprocal;
}

} // namespace

Json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

linalg::SymmetricMatrix symmetric_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("entries")) throw ValidationError("symmetric matrix needs 'n' and 'entries'");
    const std::size_t n = size_field(j, "n");
    if (n == 0) throw ValidationError("symmetric matrix needs n >= 1");
    return linalg::SymmetricMatrix::from_entries(n, flat_entries(j["entries"], n, n));
}

linalg::RectMatrix rect_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("entries"))
        throw ValidationError("rectangular matrix needs 'm', 'n' and 'entries'");
    const std::size_t m = size_field(j, "m");
    const std::size_t n = size_field(j, "n");
    if (n == 0) throw ValidationError("rectangular matrix needs n >= 1");
    return linalg::RectMatrix::from_entries(m, n, flat_entries(j["entries"], m, n));
}

linalg::Vector vector_from_json(const Json& j) { return row_of(j, "vector"); }

lattice::LatticeBasis lattice_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("basis")) throw ValidationError("lattice file needs 'basis'");
    const auto rows = rows_of(j["basis"], "basis");
    if (rows.empty()) throw ValidationError("basis is empty");
    for (const auto& row : rows)
        if (row.size() != rows.size()) throw ValidationError("basis must hold n vectors of length n");
    return lattice::LatticeBasis::from_rows(linalg::RectMatrix::from_rows(rows));
}

SubspaceFile subspace_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("A")) throw ValidationError("subspace file needs 'A'");
    const auto rows = rows_of(j["A"], "A");
    if (rows.empty()) throw ValidationError("A is empty");
    for (const auto& row : rows)
        if (row.size() != rows.front().size()) throw ValidationError("A rows must have equal length");
    for (const auto& row : j["A"])
        for (const auto& x : row)
            if (!x.is_number_integer()) throw ValidationError("A must hold integers");
    SubspaceFile out{linalg::RectMatrix::from_rows(rows), std::nullopt, std::nullopt};
    if (j.contains("s")) out.s = j["s"].get<double>();
    if (j.contains("t")) out.t = j["t"].get<double>();
    return out;
}

Json to_json(const linalg::SymmetricMatrix& b)
{
    return Json{{"n", b.n()}, {"entries", std::vector<double>(b.entries().begin(), b.entries().end())}};
}

Json to_json(const linalg::RectMatrix& a)
{
    return Json{{"m", a.rows()},
                {"n", a.cols()},
                {"entries", std::vector<double>(a.entries().begin(), a.entries().end())}};
}

Json to_json(const integrator::Estimate& estimate)
{
    return Json{{"value", estimate.value},
                {"log_value", estimate.log_value},
                {"rel_stderr", estimate.rel_stderr},
                {"n_evals", estimate.n_evals},
                {"seed", estimate.seed},
                {"converged", estimate.converged},
                {"backend", std::string(integrator::to_string(estimate.backend))},
                {"acceptance_rate", number_or_null(estimate.acceptance_rate)}};
}

Json to_json(const core::RegimeReport& report)
{
    return Json{{"regime", std::string(core::to_string(report.regime))}, {"s", report.s}, {"detail", report.detail}};
}

Json to_json(const core::ThetaResult& result, double conf)
{
    const auto& e = result.estimate;
    const bool mc = uses_integrator(result.regime.regime);
    return Json{{"value", e.value},
                {"rel_stderr", e.rel_stderr},
                {"regime", std::string(core::to_string(result.regime.regime))},
                {"s", result.s},
                {"K", result.K},
                {"n_evals", e.n_evals},
                {"seed", e.seed},
                {"converged", e.converged},
                {"log_value", e.log_value},
                {"truncation_rel_error", result.truncation_rel_error},
                {"combined_rel_error", result.combined_rel_error(conf)},
                {"conf", conf},
                {"backend", mc ? std::string(integrator::to_string(e.backend)) : std::string("none")},
                {"acceptance_rate", number_or_null(e.acceptance_rate)},
                {"detail", result.regime.detail}};
}

Json to_json(const lattice::ShortVectorReport& report, const lattice::SubspaceInstance& inst, double conf)
{
    return Json{{"decision", std::string(lattice::to_string(report.decision))},
                {"theta", to_json(report.result.theta, conf)},
                {"k", report.k},
                {"bound", report.shell_bound},
                {"additive_bound", report.result.additive_bound},
                {"lower", report.lower},
                {"upper", report.upper},
                {"n", inst.n()},
                {"m", inst.m()},
                {"s", inst.s},
                {"t", inst.t},
                {"gamma_norm", inst.gamma_norm}};
}

Json to_json(const lattice::DistanceBounds& bounds, double conf)
{
    return Json{{"d_lo", bounds.d_lo},
                {"d_hi", bounds.d_hi},
                {"log_ratio", bounds.log_ratio},
                {"log_ratio_error", bounds.log_ratio_error},
                {"tau", bounds.tau},
                {"theta", to_json(bounds.lattice_theta, conf)}};
}

Json sample_sidecar(const sampler::Sampler& sampler, const std::vector<sampler::Draw>& draws)
{
    const auto& config = sampler.config();
    const std::size_t n = config.basis.n();
    Json steps = Json::array();
    for (std::size_t k = 0; k < n; ++k) {
        long long lo = 0, hi = 0;
        double max_error = 0.0;
        bool converged = true;
        for (std::size_t d = 0; d < draws.size(); ++d) {
            const auto& st = draws[d].steps[k];
            if (d == 0 || st.lo < lo) lo = st.lo;
            if (d == 0 || st.hi > hi) hi = st.hi;
            max_error = std::max(max_error, st.max_theta_error);
            converged = converged && st.converged;
        }
        Json step{{"step", k + 1}, {"coordinate", n - 1 - k}, {"max_theta_error", max_error}, {"converged", converged}};
        if (draws.empty()) {
            step["window"] = nullptr;
        } else {
            step["window"] = Json::array({lo, hi});
        }
        steps.push_back(std::move(step));
    }
    return Json{{"count", draws.size()},
                {"n", n},
                {"eps", config.eps},
                {"seed", config.seed},
                {"l", sampler.window()},
                {"window_tail_bound", sampler.window_tail_bound()},
                {"step_eps", sampler.step_eps()},
                {"lambda_min", config.basis.bounds.lambda_min},
                {"lambda_max", config.basis.bounds.lambda_max},
                {"steps", std::move(steps)}};
}

} // namespace theta::io
