#pragma once

// JSON encodings of inputs and results.
//
//   symmetric matrix  {"n": 2, "entries": [3, 0, 0, 3]}        (row-major; nested rows also accepted)
//   rectangular       {"m": 1, "n": 3, "entries": [0, 0, 1]}
//   vector            [0.5, 0.25]
//   lattice           {"basis": [[1, 0], [0, 0.5]]}
//   subspace          {"A": [[0, 0, 1]], "s": 3.0, "t": 4.0}

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "theta/lattice.hpp"
#include "theta/sampler.hpp"
#include "theta/theta.hpp"

namespace theta::io {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::filesystem::path& path);

linalg::SymmetricMatrix symmetric_from_json(const Json& j);
linalg::RectMatrix rect_from_json(const Json& j);
linalg::Vector vector_from_json(const Json& j);
lattice::LatticeBasis lattice_from_json(const Json& j);

struct SubspaceFile {
    linalg::RectMatrix a_int;
    std::optional<double> s;
    std::optional<double> t;
};
SubspaceFile subspace_from_json(const Json& j);

Json to_json(const linalg::SymmetricMatrix& b);
Json to_json(const linalg::RectMatrix& a);

Json to_json(const integrator::Estimate& estimate);
Json to_json(const core::RegimeReport& report);
Json to_json(const core::ThetaResult& result, double conf);
Json to_json(const lattice::ShortVectorReport& report, const lattice::SubspaceInstance& inst, double conf);
Json to_json(const lattice::DistanceBounds& bounds, double conf);

// Per-step summary over all draws plus the window parameters.
Json sample_sidecar(const sampler::Sampler& sampler, const std::vector<sampler::Draw>& draws);

} // namespace theta::io
