#include "mu3/flows/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>

#include "mu3/errors.hpp"

namespace mu3 {

namespace {

constexpr double kPenetration = 1e-4;
constexpr int kSegmentProbes = 16;

double wrapped_delta(double a, double b) {
  double d = std::fmod(b - a, kTwoPi);
  if (d > M_PI) d -= kTwoPi;
  if (d <= -M_PI) d += kTwoPi;
  return d;
}

}  // namespace

Orbit integrate_orbit(const VectorFieldSpec& field, const Vec3& x0, double T, double dt) {
  if (!(T >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("integrate_orbit needs T >= 0 and dt > 0");
  const TubeCoords c0 = field.locate(x0);
  if (c0.tube < 0) throw LeftTube("orbit start lies outside every tube");
  Orbit orb;
  orb.tube = c0.tube;
  orb.T = T;
  orb.dt = dt;
  const double R = field.system().tubes[c0.tube].radius;
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  orb.points.reserve(steps + 1);
  Vec3 p = x0;
  orb.points.push_back(p);
  if (field.eval(p).isZero(0.0)) {
    // Fixed point: the whole segment is constant.
    orb.points.push_back(p);
    return orb;
  }
  double t = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double h = std::min(dt, T - t);
    const Vec3 k1 = field.eval(p);
    const Vec3 k2 = field.eval(p + 0.5 * h * k1);
    const Vec3 k3 = field.eval(p + 0.5 * h * k2);
    const Vec3 k4 = field.eval(p + h * k3);
    p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    const TubeCoords c = field.coords_in_tube(orb.tube, p);
    if (c.rho > R * (1.0 + kPenetration)) {
      throw LeftTube("orbit left tube " + std::to_string(orb.tube + 1) + " at t = " + std::to_string(t) +
                     "; decrease dt");
    }
    orb.points.push_back(p);
  }
  return orb;
}

std::vector<Vec3> short_path(const VectorFieldSpec& field, int tube, const Vec3& from, const Vec3& to,
                             ClosureFamily family, bool* straight) {
  const double R = field.system().tubes[tube].radius;
  if (straight) *straight = false;
  if (family == ClosureFamily::Short) {
    bool inside = true;
    std::vector<Vec3> seg;
    for (int k = 1; k < kSegmentProbes; ++k) {
      const Vec3 q = from + (to - from) * (double(k) / kSegmentProbes);
      if (field.coords_in_tube(tube, q).rho >= R) {
        inside = false;
        break;
      }
      seg.push_back(q);
    }
    if (inside) {
      if (straight) *straight = true;
      return seg;
    }
  }
  const TubeCoords a = field.coords_in_tube(tube, from);
  const TubeCoords b = field.coords_in_tube(tube, to);
  double dtheta = wrapped_delta(a.theta, b.theta);
  if (family == ClosureFamily::Long) dtheta += dtheta >= 0.0 ? -kTwoPi : kTwoPi;
  // Interpolate the cross-section position in Cartesian (u, w) so the path
  // never leaves the disk.
  const double ua = a.rho * std::cos(a.phi), wa = a.rho * std::sin(a.phi);
  const double ub = b.rho * std::cos(b.phi), wb = b.rho * std::sin(b.phi);
  const int n = std::max(kSegmentProbes, static_cast<int>(std::ceil(std::abs(dtheta) / kTwoPi * 256)));
  std::vector<Vec3> path;
  for (int k = 1; k < n; ++k) {
    const double f = double(k) / n;
    const double u = ua + f * (ub - ua), w = wa + f * (wb - wa);
    TubeCoords c{tube, a.theta + f * dtheta, std::hypot(u, w), std::atan2(w, u)};
    path.push_back(field.point(c));
  }
  return path;
}

ClosedOrbit close_orbit(const Orbit& orbit, const VectorFieldSpec& field, ClosureFamily family) {
  if (orbit.points.empty()) throw ClosureFailed("empty orbit");
  ClosedOrbit out;
  out.tube = orbit.tube;
  out.points = orbit.points;
  out.orbit_size = orbit.points.size();
  const Vec3& start = orbit.points.front();
  const Vec3& end = orbit.points.back();
  if (field.locate(end).tube != orbit.tube && field.coords_in_tube(orbit.tube, end).rho >
                                                  field.system().tubes[orbit.tube].radius * (1.0 + kPenetration)) {
    throw ClosureFailed("orbit endpoints lie in different tubes");
  }
  std::vector<Vec3> closing{end};
  if ((end - start).norm() > 0.0 || family == ClosureFamily::Long) {
    bool straight = false;
    const auto path = short_path(field, orbit.tube, end, start, family, &straight);
    out.straight = straight;
    out.points.insert(out.points.end(), path.begin(), path.end());
    closing.insert(closing.end(), path.begin(), path.end());
  } else {
    out.straight = true;
  }
  closing.push_back(start);
  out.closure_length = polyline_length(closing, false);
  // A fixed-point orbit repeats its start point.
  while (out.points.size() > 1 && (out.points.back() - out.points.front()).norm() == 0.0) out.points.pop_back();
  out.orbit_size = std::min(out.orbit_size, out.points.size());

  double theta_total = 0.0;
  double prev = field.coords_in_tube(out.tube, out.points.front()).theta;
  for (std::size_t k = 1; k <= out.points.size(); ++k) {
    const Vec3& q = out.points[k % out.points.size()];
    const double th = field.coords_in_tube(out.tube, q).theta;
    theta_total += wrapped_delta(prev, th);
    prev = th;
  }
  const double w = theta_total / kTwoPi;
  out.winding = static_cast<int>(std::lround(w));
  if (std::abs(w - out.winding) > 1e-6) throw ClosureFailed("non-integral winding " + std::to_string(w));
  return out;
}

double polyline_length(const std::vector<Vec3>& pts, bool closed) {
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) len += (pts[k + 1] - pts[k]).norm();
  if (closed && pts.size() > 1) len += (pts.front() - pts.back()).norm();
  return len;
}

Curve closed_polyline_curve(const std::vector<Vec3>& points) {
  auto pts = std::make_shared<std::vector<Vec3>>(points);
  auto cum = std::make_shared<std::vector<double>>(pts->size() + 1, 0.0);
  for (std::size_t k = 0; k < pts->size(); ++k) {
    (*cum)[k + 1] = (*cum)[k] + ((*pts)[(k + 1) % pts->size()] - (*pts)[k]).norm();
  }
  const double total = cum->back();
  return Curve::from_chart([pts, cum, total](double t) -> Vec3 {
    if (total == 0.0) return pts->front();
    const double s = t / kTwoPi * total;
    const auto it = std::upper_bound(cum->begin(), cum->end(), s);
    std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - cum->begin() - 1, 0), pts->size() - 1);
    const double seg = (*cum)[k + 1] - (*cum)[k];
    const double f = seg > 0.0 ? (s - (*cum)[k]) / seg : 0.0;
    return (*pts)[k] + f * ((*pts)[(k + 1) % pts->size()] - (*pts)[k]);
  });
}

void write_orbits_csv(const std::filesystem::path& path, const std::vector<ClosedOrbit>& orbits) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "x,y,z,curve\n";
  for (std::size_t c = 0; c < orbits.size(); ++c)
    for (const Vec3& q : orbits[c].points) out << q[0] << ',' << q[1] << ',' << q[2] << ',' << c << '\n';
}

}  // namespace mu3
