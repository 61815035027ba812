#pragma once

#include <filesystem>

#include <json.hpp>

#include "mu3/s3geom.hpp"

namespace mu3 {

/// Curve document:
///   {"name": str, "n_components": k, "n_samples": N,
///    "samples": [[[w,x,y,z], ... N rows], ... k components]}
/// Row j of a component is the curve at theta = 2 pi j / N.
nlohmann::json link_to_json(const Link& link, int n_samples);

/// Components are rebuilt by trigonometric interpolation of the samples and
/// renormalized onto S^3. Throws IoError on malformed documents.
Link link_from_json(const nlohmann::json& doc);

void save_link(const std::filesystem::path& path, const Link& link, int n_samples);
Link load_link(const std::filesystem::path& path);

/// Trigonometric interpolant through N equispaced samples of a closed curve.
Curve interpolate_samples(std::vector<Vec4> samples);

}  // namespace mu3
