#pragma once

// Linking numbers, the Hopf degree of F_L, mu123 and preimage diagnostics.

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mu3/forms.hpp"
#include "mu3/linkmaps.hpp"

namespace mu3 {

/// Residuals at or above this value mark a result indeterminate.
inline constexpr double kIndeterminateResidual = 0.25;

struct InvariantFlags {
  bool undersampled = false;
  bool not_exact = false;
  bool indeterminate = false;
};

struct InvariantResult {
  double raw = 0.0;
  long rounded = 0;
  double residual = 0.0;
  int grid_n = 0;
  GridShape grid;
  InvariantFlags flags;

  static InvariantResult from_raw(double raw, const GridShape& grid);
  bool trustworthy() const { return !flags.indeterminate && !flags.undersampled && !flags.not_exact; }
};

nlohmann::json to_json(const InvariantResult& r);

struct PipelineOptions {
  int n = 48;
  /// Grid refinement per axis; axis a gets n * multiplicity[a] samples.
  std::array<int, 3> multiplicity{1, 1, 1};
  Differentiation diff = Differentiation::FourthOrder;
  double tol_exact = kDefaultTolExact;
};

/// Everything the Hopf-degree pipeline measured along the way.
struct HopfReport {
  InvariantResult hopf;
  HarmonicPart harmonic;
  double closedness_residual = 0.0;
  double max_cell_variation = 0.0;
  std::map<std::string, double> timings_ms;
};

/// Degree of the Gauss map of a 2-component link (default n = 256).
InvariantResult linking_number(const Curve& first, const Curve& second, int n = 256);
InvariantResult linking_number(const Link& two_components, int n = 256);

/// H(F_L) = integral of alpha ^ F_L* nu over T^3.
/// Throws NotExact, ComponentsIntersect, UndersampledField.
HopfReport hopf_degree_report(const Link& link, const PipelineOptions& opts = {});
InvariantResult hopf_degree(const Link& link, int n = 48);
InvariantResult hopf_degree(const Link& link, const PipelineOptions& opts);

/// mu123 = H(F_L) / 2.
InvariantResult mu123(const Link& link, int n = 48);
InvariantResult mu123(const Link& link, const PipelineOptions& opts);
InvariantResult mu123_from_hopf(const InvariantResult& hopf);

/// Degrees of F_L on the coordinate 2-subtori through 0, ordered like the
/// catalog pairs: (T_st, T_su, T_tu) which carry lk12, lk13, lk23.
std::array<InvariantResult, 3> subtorus_degrees(const Link& link, int n = 256);

struct Polyline {
  /// Points in [0, 2pi)^3 in traversal order; the curve closes back to the first point.
  std::vector<Vec3> points;
  /// Net windings along s, t, u.
  std::array<int, 3> homology_class{};
};

struct PreimageLink {
  Vec3 regular_value = Vec3::UnitZ();
  std::vector<Polyline> polylines;

  std::array<int, 3> total_class() const;
};

/// Preimage F^-1(p) traced through a Kuhn tetrahedral split of every grid cube.
/// Curves are oriented so that (d g1 x d g2) points forward, where g1, g2 are
/// the components of F in a tangent frame at p. Throws NotRegularValue, BrokenChain.
PreimageLink extract_preimage(const GridField3& field, const Vec3& p);

/// Tries p and then a fixed sequence of 12 perturbed values on failure.
PreimageLink extract_preimage_auto(const GridField3& field, const Vec3& p = Vec3::UnitZ());

/// Deterministic fallback regular values around p (12 entries, angle 1e-2).
std::vector<Vec3> perturbed_regular_values(const Vec3& p);

nlohmann::json to_json(const PreimageLink& pre);
/// s,t,u per row; a NaN row separates curves.
void write_preimage_csv(const std::filesystem::path& path, const PreimageLink& pre);

}  // namespace mu3
