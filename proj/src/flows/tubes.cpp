#include "mu3/flows/tubes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mu3/detail/quadrature.hpp"
#include "mu3/errors.hpp"

namespace mu3 {

Vec3 PlanarEllipse::point(double t) const { return center + a * std::cos(t) * e1 + b * std::sin(t) * e2; }
Vec3 PlanarEllipse::velocity(double t) const { return -a * std::sin(t) * e1 + b * std::cos(t) * e2; }
Vec3 PlanarEllipse::acceleration(double t) const { return -a * std::cos(t) * e1 - b * std::sin(t) * e2; }

double PlanarEllipse::curvature(double t) const {
  const Vec3 v = velocity(t);
  return v.cross(acceleration(t)).dot(normal()) / std::pow(v.norm(), 3);
}

double PlanarEllipse::min_radius_of_curvature() const {
  const double lo = std::min(a, b), hi = std::max(a, b);
  return lo * lo / hi;
}

double PlanarEllipse::length() const {
  // Trapezoid is spectrally accurate for the periodic speed.
  const int n = 2048;
  double s = 0.0;
  for (int j = 0; j < n; ++j) s += velocity(kTwoPi * j / n).norm();
  return s * kTwoPi / n;
}

Curve PlanarEllipse::as_curve() const {
  const PlanarEllipse e = *this;
  return Curve::from_chart([e](double t) { return e.point(t); }, [e](double t) { return e.velocity(t); });
}

namespace {

// Regularized incomplete beta I_x(k+1, k+1), computed from the symmetric half.
double smoothstep(int k, double x) {
  if (x > 0.5) return 1.0 - smoothstep(k, 1.0 - x);
  double sum = 0.0, binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    sum += ((j % 2) ? -binom : binom) * std::pow(x, k + j + 1) / (k + j + 1);
    binom = binom * (k - j) / (j + 1);
  }
  return sum / std::beta(k + 1.0, k + 1.0);
}

}  // namespace

double Profile::value(double r) const {
  if (r <= r0) return 1.0;
  if (r >= 1.0) return 0.0;
  return smoothstep(smoothness, (1.0 - r) / (1.0 - r0));
}

double Profile::derivative(double r) const {
  if (r <= r0 || r >= 1.0) return 0.0;
  const double x = (1.0 - r) / (1.0 - r0);
  return -std::pow(x * (1.0 - x), smoothness) / std::beta(smoothness + 1.0, smoothness + 1.0) / (1.0 - r0);
}

double Profile::moment() const {
  const auto [x, w] = detail::gauss_legendre(smoothness + 8, r0, 1.0);
  double s = 0.5 * r0 * r0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * value(x[i]);
  return s;
}

namespace {

struct Frame {
  Vec3 c, T, N1, N2;
  double speed, kappa;
};

Frame frame_at(const PlanarEllipse& e, double theta) {
  Frame f;
  f.c = e.point(theta);
  const Vec3 v = e.velocity(theta);
  f.speed = v.norm();
  f.T = v / f.speed;
  f.N2 = e.normal();
  f.N1 = f.N2.cross(f.T);
  f.kappa = e.curvature(theta);
  return f;
}

// Parameter of the core point nearest to x.
double nearest_theta(const PlanarEllipse& e, const Vec3& x) {
  const int coarse = 64;
  double best = 0.0, best_d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < coarse; ++j) {
    const double t = kTwoPi * j / coarse;
    const double d = (x - e.point(t)).squaredNorm();
    if (d < best_d) best_d = d, best = t;
  }
  double t = best;
  for (int it = 0; it < 30; ++it) {
    const Vec3 d = x - e.point(t);
    const Vec3 v = e.velocity(t);
    const double f = d.dot(v);
    const double fp = -v.squaredNorm() + d.dot(e.acceleration(t));
    if (fp >= 0.0) break;
    const double step = f / fp;
    t -= std::clamp(step, -0.2, 0.2);
    if (std::abs(step) < 1e-14) break;
  }
  return wrap_angle(t);
}

}  // namespace

double TubeSystem::tube_volume(std::size_t i) const {
  return tubes[i].core.length() * M_PI * tubes[i].radius * tubes[i].radius;
}

TubeCoords TubeSystem::coords_in_tube(std::size_t i, const Vec3& x) const {
  const PlanarEllipse& e = tubes[i].core;
  TubeCoords c;
  c.tube = static_cast<int>(i);
  c.theta = nearest_theta(e, x);
  const Frame f = frame_at(e, c.theta);
  const Vec3 d = x - f.c;
  const double u = d.dot(f.N1), w = d.dot(f.N2);
  c.rho = std::hypot(u, w);
  c.phi = c.rho > 0.0 ? wrap_angle(std::atan2(w, u)) : 0.0;
  return c;
}

TubeCoords TubeSystem::locate(const Vec3& x) const {
  for (std::size_t i = 0; i < tubes.size(); ++i) {
    const PlanarEllipse& e = tubes[i].core;
    const double R = tubes[i].radius;
    const Vec3 d = x - e.center;
    if (std::abs(d.dot(e.normal())) > R) continue;
    const double reach = std::max(e.a, e.b) + R;
    if (d.squaredNorm() > reach * reach) continue;
    const TubeCoords c = coords_in_tube(i, x);
    if (c.rho < R) return c;
  }
  return {};
}

Vec3 TubeSystem::point(const TubeCoords& c) const {
  const Frame f = frame_at(tubes.at(c.tube).core, c.theta);
  return f.c + c.rho * (std::cos(c.phi) * f.N1 + std::sin(c.phi) * f.N2);
}

void validate_tubes(const TubeSystem& sys) {
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const double R = sys.tubes[i].radius;
    const double focal = sys.tubes[i].core.min_radius_of_curvature();
    if (!(R > 0.0) || R >= focal) {
      throw EmbeddingFailed("tube " + std::to_string(i + 1) + " radius " + std::to_string(R) +
                            " is not below the minimal focal distance " + std::to_string(focal));
    }
  }
  const int n = 512;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    for (std::size_t j = i + 1; j < sys.size(); ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (int p = 0; p < n; ++p) {
        const Vec3 a = sys.tubes[i].core.point(kTwoPi * p / n);
        for (int q = 0; q < n; ++q) best = std::min(best, (a - sys.tubes[j].core.point(kTwoPi * q / n)).norm());
      }
      const double need = sys.tubes[i].radius + sys.tubes[j].radius + kTubeMargin;
      if (best <= need) {
        throw TubesOverlap("tubes " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                           ": core distance " + std::to_string(best) + " <= " + std::to_string(need));
      }
    }
  }
  if (sys.fluxes.size() != sys.tubes.size()) throw std::invalid_argument("one flux per tube required");
}

TubeSystem borromean_tube_system(double radius, const std::vector<double>& fluxes, const Profile& profile) {
  const double a = BorromeanEllipses::kMajor, b = BorromeanEllipses::kMinor;
  const Vec3 o = Vec3::Zero(), ex = Vec3::UnitX(), ey = Vec3::UnitY(), ez = Vec3::UnitZ();
  TubeSystem sys;
  sys.tubes = {Tube{PlanarEllipse{o, ex, ey, a, b}, radius}, Tube{PlanarEllipse{o, ey, ez, a, b}, radius},
               Tube{PlanarEllipse{o, ez, ex, a, b}, radius}};
  sys.fluxes = fluxes;
  sys.profile = profile;
  validate_tubes(sys);
  return sys;
}

TubeSystem hopf_tube_system(double radius, const std::vector<double>& fluxes, const Profile& profile) {
  TubeSystem sys;
  sys.tubes = {Tube{PlanarEllipse{Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 1.0, 1.0}, radius},
               Tube{PlanarEllipse{Vec3(1, 0, 0), Vec3::UnitX(), Vec3::UnitZ(), 1.0, 1.0}, radius}};
  sys.fluxes = fluxes;
  sys.profile = profile;
  validate_tubes(sys);
  return sys;
}

Vec3 VectorFieldSpec::sample_point(std::size_t i, std::mt19937_64& rng) const {
  const Tube& tube = system().tubes.at(i);
  const PlanarEllipse& e = tube.core;
  const double R = tube.radius;
  const double hi = std::max(e.a, e.b), lo = std::min(e.a, e.b);
  const double bound = hi * (1.0 + R * hi / (lo * lo));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  // Rejection against the volume element rho |c'| (1 - rho kappa cos phi).
  while (true) {
    TubeCoords c;
    c.tube = static_cast<int>(i);
    c.theta = kTwoPi * U(rng);
    c.rho = R * std::sqrt(U(rng));
    c.phi = kTwoPi * U(rng);
    const double weight = e.velocity(c.theta).norm() * (1.0 - c.rho * e.curvature(c.theta) * std::cos(c.phi));
    if (U(rng) * bound <= weight) return point(c);
  }
}

std::vector<Vec3> VectorFieldSpec::fiber_points(const Vec3& x, int n) const {
  TubeCoords c = locate(x);
  if (c.tube < 0) throw LeftTube("fiber requested for a point outside every tube");
  std::vector<Vec3> pts(n);
  for (int j = 0; j < n; ++j) {
    c.theta = kTwoPi * j / n;
    pts[j] = point(c);
  }
  return pts;
}

Curve VectorFieldSpec::fiber_curve(const Vec3& x) const {
  const TubeCoords c = locate(x);
  if (c.tube < 0) throw LeftTube("fiber requested for a point outside every tube");
  const VectorFieldSpec* self = this;
  return Curve::from_chart([self, c](double t) {
    TubeCoords q = c;
    q.theta = t;
    return self->point(q);
  });
}

CirculatingTubeField::CirculatingTubeField(TubeSystem sys) : sys_(std::move(sys)) {
  validate_tubes(sys_);
  const double m = sys_.profile.moment();
  for (std::size_t i = 0; i < sys_.size(); ++i) {
    const double R = sys_.tubes[i].radius;
    amp_.push_back(sys_.fluxes[i] / (kTwoPi * R * R * m));
    length_.push_back(sys_.tubes[i].core.length());
  }
}

Vec3 CirculatingTubeField::eval_coords(const TubeCoords& c) const {
  if (c.tube < 0) return Vec3::Zero();
  const std::size_t i = static_cast<std::size_t>(c.tube);
  const double R = sys_.tubes[i].radius;
  const double s = sys_.profile.value(c.rho / R);
  if (s == 0.0 || amp_[i] == 0.0) return Vec3::Zero();
  const Frame f = frame_at(sys_.tubes[i].core, c.theta);
  return amp_[i] * (1.0 - kTwoPi * c.rho * std::cos(c.phi) / length_[i]) * s * f.T;
}

Vec3 CirculatingTubeField::eval(const Vec3& x) const { return eval_coords(sys_.locate(x)); }

double CirculatingTubeField::core_period(std::size_t i) const { return period_at(i, 0.0); }

double CirculatingTubeField::period_at(std::size_t i, double rho) const {
  const double s = sys_.profile.value(rho / sys_.tubes[i].radius);
  if (amp_[i] == 0.0 || s == 0.0) return std::numeric_limits<double>::infinity();
  return length_[i] / (std::abs(amp_[i]) * s);
}

std::unique_ptr<CirculatingTubeField> build_borromean_tubes(double radius, const std::vector<double>& fluxes,
                                                            const Profile& profile) {
  return std::make_unique<CirculatingTubeField>(borromean_tube_system(radius, fluxes, profile));
}

double measured_flux(const VectorFieldSpec& field, std::size_t i, double theta, int n) {
  const Tube& tube = field.system().tubes.at(i);
  const double R = tube.radius, r0 = field.system().profile.r0;
  auto [x1, w1] = detail::gauss_legendre(n, 0.0, r0 * R);
  auto [x2, w2] = detail::gauss_legendre(n, r0 * R, R);
  x1.insert(x1.end(), x2.begin(), x2.end());
  w1.insert(w1.end(), w2.begin(), w2.end());
  const int nphi = 2 * n;
  double total = 0.0;
  for (std::size_t a = 0; a < x1.size(); ++a) {
    for (int b = 0; b < nphi; ++b) {
      TubeCoords c{static_cast<int>(i), theta, x1[a], kTwoPi * b / nphi};
      // Section surface S(rho, phi); normal = dS/drho x dS/dphi.
      const double er = 1e-6 * R, ep = 1e-6;
      TubeCoords cp = c, cm = c;
      cp.rho += er;
      cm.rho -= er;
      const Vec3 dr = (field.point(cp) - field.point(cm)) / (2 * er);
      cp = c, cm = c;
      cp.phi += ep;
      cm.phi -= ep;
      const Vec3 dphi = (field.point(cp) - field.point(cm)) / (2 * ep);
      total += w1[a] * (kTwoPi / nphi) * field.eval(field.point(c)).dot(dr.cross(dphi));
    }
  }
  return total;
}

namespace {

Vec3 random_tube_point(const VectorFieldSpec& field, std::mt19937_64& rng, bool shell) {
  const auto& sys = field.system();
  std::uniform_int_distribution<std::size_t> pick(0, sys.size() - 1);
  const std::size_t i = pick(rng);
  if (!shell) return field.sample_point(i, rng);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double R = sys.tubes[i].radius;
  TubeCoords c{static_cast<int>(i), kTwoPi * U(rng), R * (1.0 - 2e-2 * U(rng)), kTwoPi * U(rng)};
  return field.point(c);
}

}  // namespace

double divergence_residual(const VectorFieldSpec& field, double h, int samples, std::uint64_t seed, int order) {
  if (order < 2 || order > 16 || order % 2) throw std::invalid_argument("unsupported difference order");
  const int p = order / 2;
  std::vector<double> c(p);
  for (int m = 1; m <= p; ++m) {
    // 2 (-1)^(m+1) (p!)^2 / (m (p-m)! (p+m)!)
    double v = 2.0 / m;
    for (int j = 1; j <= m; ++j) v *= static_cast<double>(p - m + j) / (p + j);
    c[m - 1] = (m % 2) ? v : -v;
  }
  std::mt19937_64 rng(seed);
  double worst_div = 0.0, max_b = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vec3 x = random_tube_point(field, rng, k % 2 == 1);
    max_b = std::max(max_b, field.eval(x).norm());
    double div = 0.0;
    for (int a = 0; a < 3; ++a) {
      Vec3 e = Vec3::Zero();
      e[a] = h;
      for (std::size_t m = 0; m < c.size(); ++m) {
        const double d = static_cast<double>(m + 1);
        div += c[m] * (field.eval(x + d * e)[a] - field.eval(x - d * e)[a]) / h;
      }
    }
    worst_div = std::max(worst_div, std::abs(div));
  }
  for (std::size_t i = 0; i < field.system().size(); ++i) {
    max_b = std::max(max_b, field.eval(field.point(TubeCoords{static_cast<int>(i), 0.0, 0.0, 0.0})).norm());
  }
  return max_b > 0.0 ? worst_div / max_b : 0.0;
}

double tangency_residual(const VectorFieldSpec& field, double shell, int samples) {
  double worst = 0.0;
  for (std::size_t i = 0; i < field.system().size(); ++i) {
    const double R = field.system().tubes[i].radius;
    for (int k = 0; k < samples; ++k) {
      TubeCoords c{static_cast<int>(i), kTwoPi * (k + 0.5) / samples, R * (1.0 - shell),
                   kTwoPi * std::fmod(0.618034 * k, 1.0)};
      const Vec3 B = field.eval(field.point(c));
      if (B.norm() == 0.0) continue;
      // Normal of the shell surface rho = const.
      TubeCoords tp = c, tm = c, pp = c, pm = c;
      tp.theta += 1e-6;
      tm.theta -= 1e-6;
      pp.phi += 1e-6;
      pm.phi -= 1e-6;
      const Vec3 normal =
          (field.point(tp) - field.point(tm)).cross(field.point(pp) - field.point(pm)).normalized();
      worst = std::max(worst, std::abs(B.dot(normal)) / B.norm());
    }
  }
  return worst;
}

}  // namespace mu3
