#pragma once

// RK4 orbit segments and their closure by in-tube short paths.

#include <filesystem>
#include <vector>

#include "mu3/flows/tubes.hpp"

namespace mu3 {

struct Orbit {
  int tube = -1;
  double T = 0.0, dt = 0.0;
  /// x(0), x(dt), ..., x(T); the last step is shortened to land on T.
  std::vector<Vec3> points;
};

/// Classical RK4. Throws LeftTube when x0 is outside every tube or the orbit
/// penetrates its tube boundary by more than 1e-4 radius.
Orbit integrate_orbit(const VectorFieldSpec& field, const Vec3& x0, double T, double dt);

/// Short: straight segment when it stays inside the tube, otherwise linear
/// interpolation of tube coordinates with theta taking the short way round.
/// Long: tube-coordinate path with theta taking the other way round.
enum class ClosureFamily { Short, Long };

struct ClosedOrbit {
  int tube = -1;
  /// Orbit points followed by interior points of the closing path; the curve
  /// returns to points.front().
  std::vector<Vec3> points;
  std::size_t orbit_size = 0;
  double closure_length = 0.0;
  bool straight = false;
  /// Net turns around the tube core (accumulated theta / 2 pi).
  int winding = 0;
};

/// Throws ClosureFailed when the endpoints lie in different tubes or the
/// winding count is not integral.
ClosedOrbit close_orbit(const Orbit& orbit, const VectorFieldSpec& field,
                        ClosureFamily family = ClosureFamily::Short);

/// Closing path from `from` to `to` (exclusive of both endpoints).
std::vector<Vec3> short_path(const VectorFieldSpec& field, int tube, const Vec3& from, const Vec3& to,
                             ClosureFamily family, bool* straight = nullptr);

/// Piecewise-linear closed curve through the points, parametrized
/// proportionally to arc length and lifted to S^3.
Curve closed_polyline_curve(const std::vector<Vec3>& points);

double polyline_length(const std::vector<Vec3>& points, bool closed);

/// x,y,z,curve rows.
void write_orbits_csv(const std::filesystem::path& path, const std::vector<ClosedOrbit>& orbits);

}  // namespace mu3
