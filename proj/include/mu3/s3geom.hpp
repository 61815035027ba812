#pragma once

// Unit quaternions, stereographic charts, parametrized closed curves on S^3
// and the catalog of reference links.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace mu3 {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Point of S^3 written as w + x i + y j + z k.
struct UnitQuaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  static UnitQuaternion identity() { return {}; }
  static UnitQuaternion from_vector(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

  Vec4 as_vector() const { return {w, x, y, z}; }
  double norm() const;
  UnitQuaternion normalized() const;
  /// Conjugate; equals the inverse for unit quaternions.
  UnitQuaternion inverse() const { return {w, -x, -y, -z}; }
};

using S3Point = UnitQuaternion;

/// Hamilton product of arbitrary 4-vectors (no renormalization).
Vec4 hamilton(const Vec4& a, const Vec4& b);

/// Hamilton product of unit quaternions, renormalized onto S^3.
UnitQuaternion qmul(const UnitQuaternion& a, const UnitQuaternion& b);

inline UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return qmul(a, b);
}

/// Euclidean (chordal) distance in R^4.
double chord_distance(const S3Point& a, const S3Point& b);

/// Projection from the pole 1: (w,x,y,z) -> (x,y,z)/(1-w).
/// Throws PoleSingularity when |1 - w| < 1e-9.
Vec3 stereographic_projection(const S3Point& p);

S3Point inverse_stereographic(const Vec3& p);

/// Differential of inverse_stereographic at p applied to dp.
Vec4 inverse_stereographic_differential(const Vec3& p, const Vec3& dp);

/// Isometry p -> left * p * right of S^3 (an element of SO(4)).
struct S3Isometry {
  UnitQuaternion left;
  UnitQuaternion right;

  S3Point apply(const S3Point& p) const { return qmul(qmul(left, p), right); }
  Vec4 apply_linear(const Vec4& v) const {
    return hamilton(hamilton(left.as_vector(), v), right.as_vector());
  }
};

/// Closed parametrized curve theta in [0, 2pi) -> S^3.
///
/// Evaluation wraps theta into [0, 2pi), so curve(0) == curve(2pi) holds exactly.
/// When no analytic derivative is supplied, a 4th-order central difference with
/// step 2pi/4096 is used.
class Curve {
 public:
  using Param = std::function<S3Point(double)>;
  using Deriv = std::function<Vec4(double)>;
  using ChartParam = std::function<Vec3(double)>;

  static constexpr double kFiniteDifferenceStep = kTwoPi / 4096.0;

  Curve() = default;
  explicit Curve(Param param, Deriv deriv = {}, int orientation = 1);

  /// Curve given in the R^3 chart, lifted with inverse_stereographic.
  static Curve from_chart(ChartParam p, ChartParam dp = {});

  S3Point operator()(double theta) const;
  Vec4 derivative(double theta) const;

  int orientation() const { return orientation_; }
  bool has_analytic_derivative() const { return static_cast<bool>(deriv_); }

  Curve reversed() const;
  /// theta -> theta + delta.
  Curve shifted(double delta) const;
  /// theta -> n theta (n-fold cover of the parameter circle), n >= 1.
  Curve covered(int n) const;
  Curve mapped(const S3Isometry& g) const;

 private:
  Param param_;
  Deriv deriv_;
  int orientation_ = 1;
};

double wrap_angle(double theta);

struct Link {
  std::string name;
  std::vector<Curve> components;

  std::size_t size() const { return components.size(); }
  const Curve& operator[](std::size_t i) const { return components[i]; }

  Link sublink(std::initializer_list<std::size_t> idx) const;
  /// Reorders components: result[k] = components[order[k]].
  Link permuted(const std::vector<std::size_t>& order) const;
  Link mapped(const S3Isometry& g) const;
};

/// Minimum chordal distance between two curves over an n x n sample grid.
double min_curve_distance(const Curve& a, const Curve& b, int n = 256);

struct LinkCatalogEntry {
  std::string name;
  Link link;
  /// lk(L1,L2), lk(L1,L3), lk(L2,L3) under the catalog orientations.
  std::array<int, 3> expected_pairwise_lk{};
  /// Empty when mu123 is undefined (some pairwise linking number nonzero).
  std::optional<int> expected_mu123;
  /// Number of times each component covers its image; grids are refined
  /// along covered axes.
  std::array<int, 3> axis_multiplicity{1, 1, 1};
};

/// Names: unlink3, hopf_plus_unknot, borromean, borromean_n (with twist),
/// split_hopf. "borromean_n(k)" is also accepted. Throws UnknownLink.
LinkCatalogEntry catalog(const std::string& name, int twist = 1);

std::vector<std::string> catalog_names();

/// Semi-axes of the Borromean ellipses in the R^3 chart. The three ellipses
/// lie in the xy, yz and zx planes.
struct BorromeanEllipses {
  static constexpr double kMajor = 1.4142135623730951;
  static constexpr double kMinor = 0.7071067811865476;
};

}  // namespace mu3
