#pragma once

// Solid tubes around planar elliptic cores in the R^3 chart and divergence-free
// fields circulating along their fibers.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mu3/s3geom.hpp"

namespace mu3 {

/// c(theta) = center + a cos(theta) e1 + b sin(theta) e2, with e1, e2 orthonormal.
struct PlanarEllipse {
  Vec3 center = Vec3::Zero();
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();
  double a = 1.0, b = 1.0;

  Vec3 point(double theta) const;
  Vec3 velocity(double theta) const;
  Vec3 acceleration(double theta) const;
  Vec3 normal() const { return e1.cross(e2); }
  /// Curvature (positive: the ellipse turns toward its center).
  double curvature(double theta) const;
  double min_radius_of_curvature() const;
  double length() const;
  Curve as_curve() const;
};

/// Radial profile s(r) on [0, 1]: 1 for r <= r0, then the smoothstep
/// I_x(k+1, k+1) (regularized incomplete beta) with x = (1 - r)/(1 - r0),
/// reaching 0 at r = 1.
struct Profile {
  std::string name = "flat_top";
  double r0 = 0.7;
  /// C^k joins at r0 and at the boundary
  int smoothness = 6;

  double value(double r) const;
  double derivative(double r) const;
  /// integral_0^1 r s(r) dr
  double moment() const;
};

struct Tube {
  PlanarEllipse core;
  double radius = 0.2;
};

/// Tube coordinates: X = c(theta) + rho (cos(phi) N1 + sin(phi) N2) with T the
/// unit tangent, N2 the plane normal and N1 = N2 x T pointing inward.
struct TubeCoords {
  int tube = -1;  // -1: outside every tube
  double theta = 0.0, rho = 0.0, phi = 0.0;
};

struct TubeSystem {
  std::vector<Tube> tubes;
  std::vector<double> fluxes;
  Profile profile;

  std::size_t size() const { return tubes.size(); }
  /// Analytic volume: core length * pi * radius^2 (the curvature term
  /// integrates to zero over phi).
  double tube_volume(std::size_t i) const;
  TubeCoords locate(const Vec3& x) const;
  Vec3 point(const TubeCoords& c) const;
  /// Position relative to tube i even outside it (nearest core point).
  TubeCoords coords_in_tube(std::size_t i, const Vec3& x) const;
};

inline constexpr double kTubeMargin = 0.05;

/// Throws EmbeddingFailed when a radius reaches the minimal focal distance of
/// its core and TubesOverlap when two tubes come within kTubeMargin (512
/// core samples each).
void validate_tubes(const TubeSystem& sys);

/// Cores are the Borromean catalog ellipses.
TubeSystem borromean_tube_system(double radius, const std::vector<double>& fluxes,
                                 const Profile& profile = {});

/// Two round cores forming a Hopf link (radius 1, centers 1 apart).
TubeSystem hopf_tube_system(double radius, const std::vector<double>& fluxes, const Profile& profile = {});

/// A volume-preserving field supported in a union of tubes, with its tube chart.
class VectorFieldSpec {
 public:
  virtual ~VectorFieldSpec() = default;

  virtual Vec3 eval(const Vec3& x) const = 0;
  /// Tube coordinates of x, transported through any deformation.
  virtual TubeCoords locate(const Vec3& x) const = 0;
  virtual Vec3 point(const TubeCoords& c) const = 0;
  /// Coordinates relative to tube i even slightly outside it.
  virtual TubeCoords coords_in_tube(std::size_t i, const Vec3& x) const = 0;
  virtual const TubeSystem& system() const = 0;

  /// Volume of the support of tube i.
  double tube_volume(std::size_t i) const { return system().tube_volume(i); }
  /// Uniform sample from tube i.
  Vec3 sample_point(std::size_t i, std::mt19937_64& rng) const;
  /// Fiber circle through x (theta varies, rho and phi fixed), as a curve in the chart.
  std::vector<Vec3> fiber_points(const Vec3& x, int n) const;
  Curve fiber_curve(const Vec3& x) const;
  /// Flow time for one circulation along the core of tube i.
  virtual double core_period(std::size_t i) const = 0;
  virtual double period_at(std::size_t i, double rho) const = 0;
};

/// B = C (1 - 2 pi rho cos(phi) / l) s(rho/R) T with C = Phi / (2 pi R^2 moment).
/// Exactly divergence-free, tangent to the tube boundary; every orbit is a
/// fiber circle with period l / (C s(rho/R)).
class CirculatingTubeField : public VectorFieldSpec {
 public:
  explicit CirculatingTubeField(TubeSystem sys);

  Vec3 eval(const Vec3& x) const override;
  TubeCoords locate(const Vec3& x) const override { return sys_.locate(x); }
  Vec3 point(const TubeCoords& c) const override { return sys_.point(c); }
  TubeCoords coords_in_tube(std::size_t i, const Vec3& x) const override { return sys_.coords_in_tube(i, x); }
  const TubeSystem& system() const override { return sys_; }
  double core_period(std::size_t i) const override;
  double period_at(std::size_t i, double rho) const override;

  double amplitude(std::size_t i) const { return amp_[i]; }
  Vec3 eval_coords(const TubeCoords& c) const;

 private:
  TubeSystem sys_;
  std::vector<double> amp_, length_;
};

std::unique_ptr<CirculatingTubeField> build_borromean_tubes(double radius, const std::vector<double>& fluxes,
                                                            const Profile& profile = {});

/// Flux of `field` through the disk section of tube i at theta (Gauss-Legendre
/// in rho times trapezoid in phi).
double measured_flux(const VectorFieldSpec& field, std::size_t i, double theta, int n = 64);

/// max |div B| / max |B| with central differences of even order <= 16 of step h
/// at random points of the tubes and of the shells just inside their boundaries.
double divergence_residual(const VectorFieldSpec& field, double h, int samples = 2000, std::uint64_t seed = 7,
                           int order = 8);

/// max over points of the shell rho = R (1 - shell) of |normal component| / |B|.
double tangency_residual(const VectorFieldSpec& field, double shell = 1e-2, int samples = 500);

}  // namespace mu3
