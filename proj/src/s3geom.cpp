#include "mu3/s3geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mu3/errors.hpp"

namespace mu3 {

double UnitQuaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

UnitQuaternion UnitQuaternion::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Vec4 hamilton(const Vec4& a, const Vec4& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

UnitQuaternion qmul(const UnitQuaternion& a, const UnitQuaternion& b) {
  return UnitQuaternion::from_vector(hamilton(a.as_vector(), b.as_vector())).normalized();
}

double chord_distance(const S3Point& a, const S3Point& b) {
  return (a.as_vector() - b.as_vector()).norm();
}

Vec3 stereographic_projection(const S3Point& p) {
  const double d = 1.0 - p.w;
  if (std::abs(d) < 1e-9) {
    throw PoleSingularity("point within 1e-9 of the projection pole 1");
  }
  return Vec3(p.x, p.y, p.z) / d;
}

S3Point inverse_stereographic(const Vec3& p) {
  const double r2 = p.squaredNorm();
  const double s = 1.0 / (r2 + 1.0);
  return {(r2 - 1.0) * s, 2.0 * p[0] * s, 2.0 * p[1] * s, 2.0 * p[2] * s};
}

Vec4 inverse_stereographic_differential(const Vec3& p, const Vec3& dp) {
  const double r2 = p.squaredNorm();
  const double s = 1.0 / (r2 + 1.0);
  const double pdp = p.dot(dp);
  Vec4 out;
  out[0] = 4.0 * pdp * s * s;
  out.tail<3>() = 2.0 * s * dp - 4.0 * pdp * s * s * p;
  return out;
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

Curve::Curve(Param param, Deriv deriv, int orientation)
    : param_(std::move(param)), deriv_(std::move(deriv)), orientation_(orientation >= 0 ? 1 : -1) {}

Curve Curve::from_chart(ChartParam p, ChartParam dp) {
  Param param = [p](double t) { return inverse_stereographic(p(t)); };
  Deriv deriv;
  if (dp) {
    deriv = [p, dp](double t) { return inverse_stereographic_differential(p(t), dp(t)); };
  }
  return Curve(std::move(param), std::move(deriv));
}

S3Point Curve::operator()(double theta) const {
  return param_(wrap_angle(orientation_ * theta));
}

Vec4 Curve::derivative(double theta) const {
  if (deriv_) return orientation_ * deriv_(wrap_angle(orientation_ * theta));
  const double h = kFiniteDifferenceStep;
  const Vec4 fp1 = (*this)(theta + h).as_vector();
  const Vec4 fm1 = (*this)(theta - h).as_vector();
  const Vec4 fp2 = (*this)(theta + 2 * h).as_vector();
  const Vec4 fm2 = (*this)(theta - 2 * h).as_vector();
  return (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
}

Curve Curve::reversed() const {
  Curve c = *this;
  c.orientation_ = -orientation_;
  return c;
}

Curve Curve::shifted(double delta) const {
  Curve base = *this;
  Param p = [base, delta](double t) { return base(t + delta); };
  Deriv d;
  if (deriv_) d = [base, delta](double t) { return base.derivative(t + delta); };
  return Curve(std::move(p), std::move(d));
}

Curve Curve::covered(int n) const {
  Curve base = *this;
  Param p = [base, n](double t) { return base(n * t); };
  Deriv d;
  if (deriv_) d = [base, n](double t) { return Vec4(n * base.derivative(n * t)); };
  return Curve(std::move(p), std::move(d));
}

Curve Curve::mapped(const S3Isometry& g) const {
  Curve base = *this;
  Param p = [base, g](double t) { return g.apply(base(t)); };
  Deriv d;
  if (deriv_) d = [base, g](double t) { return g.apply_linear(base.derivative(t)); };
  return Curve(std::move(p), std::move(d));
}

Link Link::sublink(std::initializer_list<std::size_t> idx) const {
  Link out{name, {}};
  for (std::size_t i : idx) out.components.push_back(components.at(i));
  return out;
}

Link Link::permuted(const std::vector<std::size_t>& order) const {
  Link out{name, {}};
  for (std::size_t i : order) out.components.push_back(components.at(i));
  return out;
}

Link Link::mapped(const S3Isometry& g) const {
  Link out{name, {}};
  for (const auto& c : components) out.components.push_back(c.mapped(g));
  return out;
}

double min_curve_distance(const Curve& a, const Curve& b, int n) {
  std::vector<S3Point> sa(n), sb(n);
  for (int i = 0; i < n; ++i) {
    sa[i] = a(kTwoPi * i / n);
    sb[i] = b(kTwoPi * i / n);
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : sa)
    for (const auto& q : sb) best = std::min(best, chord_distance(p, q));
  return best;
}

namespace {

// Ellipse in the R^3 chart: center + a cos(t) e1 + b sin(t) e2.
Curve chart_ellipse(const Vec3& center, const Vec3& e1, const Vec3& e2, double a, double b) {
  return Curve::from_chart(
      [=](double t) -> Vec3 { return center + a * std::cos(t) * e1 + b * std::sin(t) * e2; },
      [=](double t) -> Vec3 { return -a * std::sin(t) * e1 + b * std::cos(t) * e2; });
}

Link borromean_link(int twist) {
  const double a = BorromeanEllipses::kMajor;
  const double b = BorromeanEllipses::kMinor;
  const Vec3 o = Vec3::Zero(), ex = Vec3::UnitX(), ey = Vec3::UnitY(), ez = Vec3::UnitZ();
  Link link{"borromean", {}};
  link.components.push_back(chart_ellipse(o, ex, ey, a, b));
  link.components.push_back(chart_ellipse(o, ey, ez, a, b));
  link.components.push_back(chart_ellipse(o, ez, ex, a, b));
  if (twist != 1) {
    link.name = "borromean_n(" + std::to_string(twist) + ")";
    link.components[0] = link.components[0].covered(twist);
  }
  return link;
}

// A Hopf pair of unit-ish circles in the chart.
std::array<Curve, 2> hopf_pair(const Vec3& shift) {
  const double r = 0.7;
  return {chart_ellipse(shift, Vec3::UnitX(), Vec3::UnitY(), r, r),
          chart_ellipse(shift + Vec3(r, 0, 0), Vec3::UnitX(), Vec3::UnitZ(), r, r)};
}

Curve small_circle(const Vec3& center, double r) {
  return chart_ellipse(center, Vec3::UnitX(), Vec3::UnitY(), r, r);
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"unlink3", "hopf_plus_unknot", "borromean", "borromean_n", "split_hopf"};
}

LinkCatalogEntry catalog(const std::string& name_in, int twist) {
  std::string name = name_in;
  if (name.rfind("borromean_n(", 0) == 0 && name.back() == ')') {
    try {
      twist = std::stoi(name.substr(12, name.size() - 13));
    } catch (const std::exception&) {
      throw UnknownLink("cannot parse twist in '" + name_in + "'");
    }
    name = "borromean_n";
  }

  LinkCatalogEntry e;
  e.name = name;
  if (name == "borromean") {
    e.link = borromean_link(1);
    e.expected_pairwise_lk = {0, 0, 0};
    e.expected_mu123 = -1;
  } else if (name == "borromean_n") {
    if (twist < 1) throw UnknownLink("borromean_n requires twist >= 1");
    e.link = borromean_link(twist);
    e.name = e.link.name;
    e.expected_pairwise_lk = {0, 0, 0};
    e.expected_mu123 = -twist;
    e.axis_multiplicity = {twist, 1, 1};
  } else if (name == "unlink3") {
    e.link = Link{"unlink3",
                  {small_circle(Vec3(-1, 0, 0), 0.1), small_circle(Vec3(1, 0, 0), 0.1),
                   small_circle(Vec3(0, 1, 0), 0.1)}};
    e.expected_pairwise_lk = {0, 0, 0};
    e.expected_mu123 = 0;
  } else if (name == "hopf_plus_unknot") {
    auto pair = hopf_pair(Vec3::Zero());
    e.link = Link{name, {small_circle(Vec3(0, 0, 2.5), 0.4), pair[0], pair[1]}};
    e.expected_pairwise_lk = {0, 0, 1};
  } else if (name == "split_hopf") {
    auto pair = hopf_pair(Vec3::Zero());
    e.link = Link{name, {pair[0], pair[1], small_circle(Vec3(0, 0, 2.5), 0.4)}};
    e.expected_pairwise_lk = {1, 0, 0};
  } else {
    throw UnknownLink("no catalog entry named '" + name_in + "'");
  }
  return e;
}

}  // namespace mu3
