#include "mu3/linkmaps.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mu3/detail/binary.hpp"
#include "mu3/errors.hpp"
#include "mu3/parallel.hpp"

namespace mu3 {

namespace {

constexpr double kIntersectionDistance = 1e-6;

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

std::vector<double> axis_angles(int n) {
  std::vector<double> th(n);
  for (int i = 0; i < n; ++i) th[i] = kTwoPi * i / n;
  return th;
}

Vec3 normalized_difference(const Vec3& head, const Vec3& tail) {
  const Vec3 d = head - tail;
  const double r = d.norm();
  if (r < kIntersectionDistance) throw ComponentsIntersect("components meet in the chart");
  return d / r;
}

// pr(x^-1 y); the pole of pr is the diagonal x == y.
Vec3 relative_chart_point(const S3Point& x_inv, const S3Point& y) {
  try {
    return stereographic_projection(qmul(x_inv, y));
  } catch (const PoleSingularity&) {
    // Every isometry of S^3 preserves |x^-1 y - 1| = |y - x|, so no rotation
    // of the link can move this sample off the pole.
    throw UnresolvablePole("x(s)^-1 y within the pole margin; components nearly touch");
  }
}

}  // namespace

void validate_grid_shape(const GridShape& shape) {
  for (int a = 0; a < 3; ++a) {
    if (shape[a] < 8 || shape[a] % 2 != 0) {
      throw std::invalid_argument("grid axes must be even and >= 8");
    }
  }
}

GaussMap::GaussMap(Curve first, Curve second) : first_(std::move(first)), second_(std::move(second)) {
  if (min_curve_distance(first_, second_) < kIntersectionDistance) {
    throw ComponentsIntersect("Gauss map components are within 1e-6");
  }
}

Vec3 GaussMap::operator()(double s, double t) const {
  return normalized_difference(stereographic_projection(first_(s)),
                               stereographic_projection(second_(t)));
}

ConfMap3::ConfMap3(Link link) : link_(std::move(link)) {
  if (link_.size() != 3) throw std::invalid_argument("ConfMap3 needs exactly 3 components");
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (min_curve_distance(link_[i], link_[j]) < kIntersectionDistance) {
        throw ComponentsIntersect("components " + std::to_string(i + 1) + " and " +
                                  std::to_string(j + 1) + " are within 1e-6");
      }
    }
  }
}

Vec3 ConfMap3::operator()(double s, double t, double u) const {
  const S3Point x_inv = link_[0](s).inverse();
  return normalized_difference(relative_chart_point(x_inv, link_[2](u)),
                               relative_chart_point(x_inv, link_[1](t)));
}

void update_cell_variation(GridField2& f) {
  double worst = 0.0;
  for (int i = 0; i < f.n1; ++i) {
    for (int j = 0; j < f.n2; ++j) {
      const Vec3& v = f.at(i, j);
      worst = std::max(worst, angle_between(v, f.at((i + 1) % f.n1, j)));
      worst = std::max(worst, angle_between(v, f.at(i, (j + 1) % f.n2)));
    }
  }
  f.max_cell_variation = worst;
  f.undersampled = worst > kUndersamplingAngle;
}

void update_cell_variation(GridField3& f) {
  const GridShape& g = f.shape;
  std::vector<double> per_slice(g.ns, 0.0);
#pragma omp parallel for num_threads(thread_count()) schedule(static)
  for (int i = 0; i < g.ns; ++i) {
    double worst = 0.0;
    for (int j = 0; j < g.nt; ++j) {
      for (int k = 0; k < g.nu; ++k) {
        const Vec3& v = f.at(i, j, k);
        worst = std::max(worst, angle_between(v, f.at((i + 1) % g.ns, j, k)));
        worst = std::max(worst, angle_between(v, f.at(i, (j + 1) % g.nt, k)));
        worst = std::max(worst, angle_between(v, f.at(i, j, (k + 1) % g.nu)));
      }
    }
    per_slice[i] = worst;
  }
  f.max_cell_variation = *std::max_element(per_slice.begin(), per_slice.end());
  f.undersampled = f.max_cell_variation > kUndersamplingAngle;
}

GridField2 sample_on_grid(const GaussMap& map, int n) {
  validate_grid_shape(GridShape::cubic(n));
  const auto th = axis_angles(n);
  std::vector<Vec3> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = stereographic_projection(map.first()(th[i]));
    b[i] = stereographic_projection(map.second()(th[i]));
  }
  GridField2 f{n, n, std::vector<Vec3>(std::size_t(n) * n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f.values[std::size_t(i) * n + j] = normalized_difference(a[i], b[j]);
  update_cell_variation(f);
  return f;
}

GridField3 sample_on_grid(const ConfMap3& map, int n) {
  return sample_on_grid(map, GridShape::cubic(n));
}

GridField3 sample_on_grid(const ConfMap3& map, const GridShape& shape) {
  validate_grid_shape(shape);
  const Link& L = map.link();
  const auto ts = axis_angles(shape.ns), tt = axis_angles(shape.nt), tu = axis_angles(shape.nu);
  std::vector<S3Point> ys(shape.nt), zs(shape.nu);
  for (int j = 0; j < shape.nt; ++j) ys[j] = L[1](tt[j]);
  for (int k = 0; k < shape.nu; ++k) zs[k] = L[2](tu[k]);

  GridField3 f{shape, std::vector<Vec3>(shape.size())};
  ExceptionCollector errors;
  // Per s-slice tables pr(x^-1 y(t)) and pr(x^-1 z(u)) make sampling O(n^3)
  // vector subtractions.
#pragma omp parallel for num_threads(thread_count()) schedule(static)
  for (int i = 0; i < shape.ns; ++i) {
    errors.run([&] {
      const S3Point x_inv = L[0](ts[i]).inverse();
      std::vector<Vec3> yr(shape.nt), zr(shape.nu);
      for (int j = 0; j < shape.nt; ++j) yr[j] = relative_chart_point(x_inv, ys[j]);
      for (int k = 0; k < shape.nu; ++k) zr[k] = relative_chart_point(x_inv, zs[k]);
      for (int j = 0; j < shape.nt; ++j)
        for (int k = 0; k < shape.nu; ++k)
          f.values[shape.index(i, j, k)] = normalized_difference(zr[k], yr[j]);
    });
  }
  errors.rethrow();
  update_cell_variation(f);
  return f;
}

GridField3 sample_on_grid(const std::function<Vec3(double, double, double)>& map,
                          const GridShape& shape) {
  validate_grid_shape(shape);
  GridField3 f{shape, std::vector<Vec3>(shape.size())};
  for (int i = 0; i < shape.ns; ++i)
    for (int j = 0; j < shape.nt; ++j)
      for (int k = 0; k < shape.nu; ++k)
        f.values[shape.index(i, j, k)] =
            map(kTwoPi * i / shape.ns, kTwoPi * j / shape.nt, kTwoPi * k / shape.nu).normalized();
  update_cell_variation(f);
  return f;
}

GridField2 sample_subtorus(const ConfMap3& map, int fixed_axis, double value, int n) {
  if (fixed_axis < 0 || fixed_axis > 2) throw std::invalid_argument("fixed_axis must be 0, 1 or 2");
  validate_grid_shape(GridShape::cubic(n));
  GridField2 f{n, n, std::vector<Vec3>(std::size_t(n) * n)};
  ExceptionCollector errors;
#pragma omp parallel for num_threads(thread_count()) schedule(static)
  for (int i = 0; i < n; ++i) {
    errors.run([&] {
    for (int j = 0; j < n; ++j) {
      const double a = kTwoPi * i / n, b = kTwoPi * j / n;
      Vec3 v;
      switch (fixed_axis) {
        case 0: v = map(value, a, b); break;
        case 1: v = map(a, value, b); break;
        default: v = map(a, b, value); break;
      }
      f.values[std::size_t(i) * n + j] = v;
    }
    });
  }
  errors.rethrow();
  update_cell_variation(f);
  return f;
}

void write_grid_field(const std::filesystem::path& path, const GridField3& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  detail::write_header(out, "MU3G", field.shape);
  for (const Vec3& v : field.values)
    for (int c = 0; c < 3; ++c) detail::write_f64(out, v[c]);
  if (!out) throw IoError("write failed for " + path.string());
}

GridField3 read_grid_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  GridField3 f;
  f.shape = detail::read_header(in, "MU3G");
  f.values.resize(f.shape.size());
  for (Vec3& v : f.values)
    for (int c = 0; c < 3; ++c) v[c] = detail::read_f64(in);
  update_cell_variation(f);
  return f;
}

}  // namespace mu3
