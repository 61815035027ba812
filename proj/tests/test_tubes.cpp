#include <doctest.h>

#include <cmath>
#include <random>

#include "mu3/errors.hpp"
#include "mu3/flows.hpp"
#include "oracles.hpp"

using namespace mu3;

TEST_SUITE("tubes") {

TEST_CASE("profile shape") {
  const Profile p;
  CHECK(p.value(0.0) == 1.0);
  CHECK(p.value(p.r0) == 1.0);
  CHECK(std::abs(p.value(1.0)) < 1e-15);
  CHECK(std::abs(p.value(0.5 * (1 + p.r0)) - 0.5) < 1e-12);
  double prev = 1.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = p.r0 + (1 - p.r0) * k / 100.0;
    CHECK(p.value(r) <= prev + 1e-15);
    prev = p.value(r);
    const double h = 1e-6;
    if (k > 0 && k < 100) CHECK(std::abs((p.value(r + h) - p.value(r - h)) / (2 * h) - p.derivative(r)) < 1e-6);
  }
  // moment against a fine midpoint rule
  double m = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double r = (k + 0.5) / n;
    m += r * p.value(r) / n;
  }
  CHECK(std::abs(p.moment() - m) < 1e-9);
}

TEST_CASE("flux through disk sections") {
  const auto field = build_borromean_tubes(0.25, {1.0, 2.0, 3.0});
  for (std::size_t i = 0; i < 3; ++i)
    for (double theta : {0.3, 2.1, 4.4}) {
      CAPTURE(i);
      CAPTURE(theta);
      CHECK(std::abs(oracle::disk_flux(*field, i, theta) - double(i + 1)) < 1e-3);
      CHECK(std::abs(measured_flux(*field, i, theta) - double(i + 1)) < 1e-3);
    }

  const auto off = build_borromean_tubes(0.25, {0.0, 1.0, 1.0});
  for (int k = 0; k < 50; ++k) {
    std::mt19937_64 rng(k);
    CHECK(off->eval(off->sample_point(0, rng)).norm() == 0.0);
  }
  CHECK(std::isinf(off->core_period(0)));
}

TEST_CASE("tube validation") {
  CHECK_THROWS_AS(build_borromean_tubes(0.4, {1, 1, 1}), EmbeddingFailed);
  CHECK_THROWS_AS(build_borromean_tubes(0.3, {1, 1, 1}), TubesOverlap);
  CHECK_NOTHROW(build_borromean_tubes(0.25, {1, 1, 1}));
}

TEST_CASE("field is divergence-free and tangent to the boundary") {
  const auto field = build_borromean_tubes(0.25, {1.0, 1.0, 1.0});
  const double div = divergence_residual(*field, 0.25 / 64);
  CHECK(div < 1e-3);
  CHECK(tangency_residual(*field) < 1e-6);
  CHECK_THROWS_AS(divergence_residual(*field, 0.01, 10, 7, 3), std::invalid_argument);
  CHECK_THROWS_AS(divergence_residual(*field, 0.01, 10, 7, 18), std::invalid_argument);
  // higher stencils resolve the profile better
  CHECK(divergence_residual(*field, 0.25 / 64, 500, 7, 2) > div);
}

TEST_CASE("field vanishes outside the tubes") {
  const auto field = build_borromean_tubes(0.25, {1.0, 1.0, 1.0});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2.5, 2.5);
  int outside = 0;
  for (int k = 0; k < 4000; ++k) {
    const Vec3 x(U(rng), U(rng), U(rng));
    if (field->locate(x).tube >= 0) continue;
    ++outside;
    CHECK(field->eval(x).norm() == 0.0);
  }
  CHECK(outside > 1000);
}

TEST_CASE("tube coordinates round trip") {
  const auto field = build_borromean_tubes(0.25, {1.0, 1.0, 1.0});
  std::mt19937_64 rng(9);
  for (std::size_t i = 0; i < 3; ++i)
    for (int k = 0; k < 100; ++k) {
      const Vec3 x = field->sample_point(i, rng);
      const TubeCoords c = field->locate(x);
      CHECK(c.tube == int(i));
      CHECK(c.rho < 0.25);
      CHECK((field->point(c) - x).norm() < 1e-9);
      // the fiber through x keeps rho and phi
      for (const auto& p : field->fiber_points(x, 64)) {
        const TubeCoords q = field->locate(p);
        CHECK(q.tube == int(i));
        CHECK(std::abs(q.rho - c.rho) < 1e-9);
        CHECK(std::abs(std::remainder(q.phi - c.phi, kTwoPi)) < 1e-7);
      }
    }
}

TEST_CASE("tube volume matches Monte Carlo") {
  const TubeSystem sys = borromean_tube_system(0.25, {1, 1, 1});
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = sys.tube_volume(i);
    CHECK(std::abs(exact - sys.tubes[i].core.length() * M_PI * 0.0625) < 1e-12);
    CHECK(std::abs(monte_carlo_tube_volume(sys, i, 200000, 5) - exact) < 0.03 * exact);
  }
}

TEST_CASE("ellipse geometry") {
  const PlanarEllipse e{Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 2.0, 1.0};
  CHECK(std::abs(e.min_radius_of_curvature() - 0.5) < 1e-9);
  CHECK(std::abs(e.curvature(0.0) - 2.0) < 1e-12);
  // Ramanujan's second approximation is accurate to ~1e-10 here
  const double h = 1.0 / 9.0;
  CHECK(std::abs(e.length() - M_PI * 3 * (1 + 3 * h / (10 + std::sqrt(4 - 3 * h)))) < 1e-6);
}

}
