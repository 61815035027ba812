#pragma once

// Gauss maps of 2-component links, the configuration-space map of
// 3-component links, and their samples on periodic grids.

#include <filesystem>
#include <functional>
#include <vector>

#include "mu3/s3geom.hpp"

namespace mu3 {

/// Sizes of a periodic grid on the 3-torus along the s, t, u axes.
/// Samples sit at theta_j = 2 pi j / n per axis. Flattened index is row-major
/// with u fastest: (i_s * nt + i_t) * nu + i_u.
struct GridShape {
  int ns = 0, nt = 0, nu = 0;

  static GridShape cubic(int n) { return {n, n, n}; }

  int operator[](int axis) const { return axis == 0 ? ns : axis == 1 ? nt : nu; }
  std::size_t size() const { return std::size_t(ns) * nt * nu; }
  std::size_t index(int i, int j, int k) const { return (std::size_t(i) * nt + j) * nu + k; }
  double spacing(int axis) const { return kTwoPi / (*this)[axis]; }
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  bool is_cubic() const { return ns == nt && nt == nu; }
  /// Grid refined along covered axes: axis a gets n * multiplicity[a].
  static GridShape scaled(int n, const std::array<int, 3>& multiplicity) {
    return {n * multiplicity[0], n * multiplicity[1], n * multiplicity[2]};
  }

  bool operator==(const GridShape&) const = default;
};

/// Throws std::invalid_argument unless every axis is even and >= 8.
void validate_grid_shape(const GridShape& shape);

/// (s, t) -> (pr x(s) - pr y(t)) / |...| for a 2-component link.
class GaussMap {
 public:
  /// Throws ComponentsIntersect if the components come within 1e-6.
  GaussMap(Curve first, Curve second);

  Vec3 operator()(double s, double t) const;

  const Curve& first() const { return first_; }
  const Curve& second() const { return second_; }

 private:
  Curve first_, second_;
};

/// F_L(s,t,u) = (pr(x(s)^-1 z(u)) - pr(x(s)^-1 y(t))) / |...| for a
/// 3-component link {x, y, z} on S^3.
class ConfMap3 {
 public:
  /// Throws ComponentsIntersect if two components come within 1e-6.
  explicit ConfMap3(Link link);

  Vec3 operator()(double s, double t, double u) const;

  const Link& link() const { return link_; }

 private:
  Link link_;
};

struct GridField2 {
  int n1 = 0, n2 = 0;
  std::vector<Vec3> values;  // index i * n2 + j
  bool undersampled = false;
  double max_cell_variation = 0.0;

  const Vec3& at(int i, int j) const { return values[std::size_t(i) * n2 + j]; }
};

struct GridField3 {
  GridShape shape;
  std::vector<Vec3> values;
  bool undersampled = false;
  double max_cell_variation = 0.0;

  const Vec3& at(int i, int j, int k) const { return values[shape.index(i, j, k)]; }
};

/// Cells whose neighbouring samples differ by more than this angle flag the
/// field as undersampled.
inline constexpr double kUndersamplingAngle = 1.5707963267948966;

GridField2 sample_on_grid(const GaussMap& map, int n);
GridField3 sample_on_grid(const ConfMap3& map, int n);
GridField3 sample_on_grid(const ConfMap3& map, const GridShape& shape);
GridField3 sample_on_grid(const std::function<Vec3(double, double, double)>& map,
                          const GridShape& shape);

/// Restriction of F_L to the coordinate 2-subtorus where `fixed_axis` is held
/// at `value`; the remaining axes keep their s,t,u order.
GridField2 sample_subtorus(const ConfMap3& map, int fixed_axis, double value, int n);

/// Recomputes max_cell_variation and the undersampled flag in place.
void update_cell_variation(GridField2& field);
void update_cell_variation(GridField3& field);

/// Binary container: "MU3G", u32 version, then
///   version 1 (cubic):       u32 n,                "stu\0"
///   version 2 (anisotropic): u32 ns, u32 nt, u32 nu, "stu\0"
/// followed by one little-endian f64 triple per grid point in index order.
void write_grid_field(const std::filesystem::path& path, const GridField3& field);
GridField3 read_grid_field(const std::filesystem::path& path);

}  // namespace mu3
