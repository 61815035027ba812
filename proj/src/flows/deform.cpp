#include "mu3/flows/deform.hpp"

#include <Eigen/Dense>

namespace mu3 {

namespace {

Mat3 skew(const Vec3& e) {
  Mat3 m;
  m << 0, -e.z(), e.y(), e.z(), 0, -e.x(), -e.y(), e.x(), 0;
  return m;
}

}  // namespace

Vec3 SwirlDeformation::velocity(const Vec3& x) const {
  const Vec3 d = x - center;
  const double R2 = radius * radius;
  const double u = 1.0 - d.squaredNorm() / R2;
  if (u <= 0.0) return Vec3::Zero();
  // grad a x e with grad a = -8 A u^3 d / R^2.
  return (-8.0 * amplitude * u * u * u / R2) * d.cross(axis);
}

Mat3 SwirlDeformation::jacobian(const Vec3& x) const {
  const Vec3 d = x - center;
  const double R2 = radius * radius;
  const double u = 1.0 - d.squaredNorm() / R2;
  if (u <= 0.0) return Mat3::Zero();
  const double k = -8.0 * amplitude / R2;
  // d/dx [u^3 (d x e)] = 3 u^2 (d x e) grad(u)^T - u^3 [e]_x
  const Vec3 grad_u = -2.0 * d / R2;
  return k * (3.0 * u * u * d.cross(axis) * grad_u.transpose() - u * u * u * skew(axis));
}

Vec3 SwirlDeformation::forward(const Vec3& x) const {
  const double h = 1.0 / substeps;
  Vec3 p = x;
  for (int s = 0; s < substeps; ++s) {
    const Vec3 k1 = velocity(p);
    const Vec3 k2 = velocity(p + 0.5 * h * k1);
    const Vec3 k3 = velocity(p + 0.5 * h * k2);
    const Vec3 k4 = velocity(p + h * k3);
    p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return p;
}

Vec3 SwirlDeformation::backward(const Vec3& y) const {
  const double h = -1.0 / substeps;
  Vec3 p = y;
  for (int s = 0; s < substeps; ++s) {
    const Vec3 k1 = velocity(p);
    const Vec3 k2 = velocity(p + 0.5 * h * k1);
    const Vec3 k3 = velocity(p + 0.5 * h * k2);
    const Vec3 k4 = velocity(p + h * k3);
    p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return p;
}

std::pair<Vec3, Mat3> SwirlDeformation::backward_with_jacobian(const Vec3& y) const {
  const double h = -1.0 / substeps;
  Vec3 p = y;
  Mat3 M = Mat3::Identity();
  if ((y - center).norm() >= radius) return {p, M};
  for (int s = 0; s < substeps; ++s) {
    const Vec3 k1 = velocity(p);
    const Mat3 m1 = jacobian(p) * M;
    const Vec3 p2 = p + 0.5 * h * k1;
    const Vec3 k2 = velocity(p2);
    const Mat3 m2 = jacobian(p2) * (M + 0.5 * h * m1);
    const Vec3 p3 = p + 0.5 * h * k2;
    const Vec3 k3 = velocity(p3);
    const Mat3 m3 = jacobian(p3) * (M + 0.5 * h * m2);
    const Vec3 p4 = p + h * k3;
    const Vec3 k4 = velocity(p4);
    const Mat3 m4 = jacobian(p4) * (M + h * m3);
    p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    M += h / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
  }
  return {p, M};
}

PushedForwardField::PushedForwardField(std::shared_ptr<const VectorFieldSpec> base, SwirlDeformation g)
    : base_(std::move(base)), g_(std::move(g)) {
  g_.axis.normalize();
}

Vec3 PushedForwardField::eval(const Vec3& y) const {
  const auto [x, Minv] = g_.backward_with_jacobian(y);
  const Vec3 B = base_->eval(x);
  if (B.isZero(0.0)) return B;
  return Minv.partialPivLu().solve(B);
}

}  // namespace mu3
