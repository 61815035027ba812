#pragma once

// Compactly supported volume-preserving deformations and push-forward of tube fields.

#include <memory>
#include <utility>

#include <Eigen/Core>

#include "mu3/flows/tubes.hpp"

namespace mu3 {

using Mat3 = Eigen::Matrix3d;

/// V = curl(a e) with a(x) = A (1 - |x - c|^2 / R^2)^4 inside the ball of radius R.
/// g is the time-1 map of V computed with `substeps` RK4 steps.
struct SwirlDeformation {
  Vec3 center = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double radius = 1.5;
  double amplitude = 0.3;
  int substeps = 32;

  Vec3 velocity(const Vec3& x) const;
  Mat3 jacobian(const Vec3& x) const;

  Vec3 forward(const Vec3& x) const;
  Vec3 backward(const Vec3& y) const;
  /// (g^-1(y), D(g^-1)(y)) from the backward flow and its variational equation.
  std::pair<Vec3, Mat3> backward_with_jacobian(const Vec3& y) const;
};

/// y -> Dg(x) B(x) with x = g^-1(y). The chart is chart o g^-1, so orbits,
/// fibers and tube volumes are carried over by g.
class PushedForwardField : public VectorFieldSpec {
 public:
  PushedForwardField(std::shared_ptr<const VectorFieldSpec> base, SwirlDeformation g);

  Vec3 eval(const Vec3& y) const override;
  TubeCoords locate(const Vec3& y) const override { return base_->locate(g_.backward(y)); }
  Vec3 point(const TubeCoords& c) const override { return g_.forward(base_->point(c)); }
  TubeCoords coords_in_tube(std::size_t i, const Vec3& y) const override {
    return base_->coords_in_tube(i, g_.backward(y));
  }
  const TubeSystem& system() const override { return base_->system(); }
  double core_period(std::size_t i) const override { return base_->core_period(i); }
  double period_at(std::size_t i, double rho) const override { return base_->period_at(i, rho); }

  const SwirlDeformation& deformation() const { return g_; }

 private:
  std::shared_ptr<const VectorFieldSpec> base_;
  SwirlDeformation g_;
};

}  // namespace mu3
