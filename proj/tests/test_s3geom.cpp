#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "mu3/curve_io.hpp"
#include "mu3/errors.hpp"
#include "mu3/s3geom.hpp"

using namespace mu3;

namespace {

UnitQuaternion random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return UnitQuaternion{g(rng), g(rng), g(rng), g(rng)}.normalized();
}

double dist(const UnitQuaternion& a, const UnitQuaternion& b) { return (a.as_vector() - b.as_vector()).norm(); }

}  // namespace

TEST_SUITE("s3geom") {

TEST_CASE("quaternion products") {
  const UnitQuaternion i{0, 1, 0, 0}, j{0, 0, 1, 0}, k{0, 0, 0, 1};
  CHECK(dist(i * j, k) < 1e-15);
  CHECK(dist(j * k, i) < 1e-15);
  CHECK(dist(j * i, UnitQuaternion{0, 0, 0, -1}) < 1e-15);

  std::mt19937_64 rng(3);
  for (int n = 0; n < 200; ++n) {
    const auto q = random_unit(rng);
    CHECK(std::abs(q.norm() - 1.0) < 1e-12);
    CHECK(dist(q * q.inverse(), UnitQuaternion::identity()) < 1e-12);
    CHECK(dist(q.inverse() * q, UnitQuaternion::identity()) < 1e-12);
  }
}

TEST_CASE("inverse of the rotation curve") {
  for (double s : {0.0, 0.3, 1.7, 4.0}) {
    const UnitQuaternion x{std::cos(s), 0, 0, std::sin(s)};
    CHECK(dist(x.inverse(), UnitQuaternion{std::cos(s), 0, 0, -std::sin(s)}) < 1e-15);
  }
}

TEST_CASE("left multiplication is an isometry") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 200; ++n) {
    const auto x = random_unit(rng), p = random_unit(rng), q = random_unit(rng);
    CHECK(std::abs(dist(x.inverse() * p, x.inverse() * q) - dist(p, q)) < 1e-10);
  }
}

TEST_CASE("stereographic chart") {
  CHECK(stereographic_projection({-1, 0, 0, 0}).norm() < 1e-15);
  CHECK((stereographic_projection({0, 0, 0, 1}) - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK_THROWS_AS(stereographic_projection(UnitQuaternion::identity()), PoleSingularity);

  // pr(cos s + sin s k) runs along the z-axis
  for (double s : {0.2, 1.0, 2.5, 4.0, 5.9}) {
    const Vec3 p = stereographic_projection({std::cos(s), 0, 0, std::sin(s)});
    CHECK(std::abs(p.x()) < 1e-15);
    CHECK(std::abs(p.y()) < 1e-15);
  }

  std::mt19937_64 rng(7);
  for (int n = 0; n < 200; ++n) {
    const auto q = random_unit(rng);
    if (q.w > 0.99) continue;
    CHECK(dist(inverse_stereographic(stereographic_projection(q)), q) < 1e-10);
  }
}

TEST_CASE("catalog curves") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const auto e = catalog(name, 3);
    for (const auto& c : e.link.components) {
      CHECK(dist(c(0.0), c(kTwoPi)) == 0.0);
      for (int j = 0; j < 256; ++j) CHECK(std::abs(c(kTwoPi * j / 256).norm() - 1.0) < 1e-10);
      // analytic derivative vs 4th-order central differences
      const double h = 1e-3;
      for (int j = 0; j < 16; ++j) {
        const double t = kTwoPi * (j + 0.37) / 16;
        const Vec4 fd = (-c(t + 2 * h).as_vector() + 8 * c(t + h).as_vector() - 8 * c(t - h).as_vector() +
                         c(t - 2 * h).as_vector()) /
                        (12 * h);
        CHECK((c.derivative(t) - fd).norm() < 1e-6);
      }
    }
    for (std::size_t a = 0; a < e.link.size(); ++a)
      for (std::size_t b = a + 1; b < e.link.size(); ++b) CHECK(min_curve_distance(e.link[a], e.link[b], 256) > 1e-3);
  }
}

TEST_CASE("catalog expectations") {
  CHECK(catalog("unlink3").expected_pairwise_lk == std::array<int, 3>{0, 0, 0});
  CHECK(catalog("unlink3").expected_mu123 == 0);
  CHECK(catalog("borromean").expected_pairwise_lk == std::array<int, 3>{0, 0, 0});
  CHECK(std::abs(catalog("borromean").expected_mu123.value()) == 1);
  CHECK(std::abs(catalog("borromean_n", 3).expected_mu123.value()) == 3);
  CHECK(std::abs(catalog("borromean_n(5)").expected_mu123.value()) == 5);
  CHECK_FALSE(catalog("hopf_plus_unknot").expected_mu123.has_value());
  CHECK_THROWS_AS(catalog("trefoil"), UnknownLink);
}

TEST_CASE("curve reparametrization helpers") {
  const Curve c = catalog("borromean").link[1];
  CHECK(dist(c.shifted(0.4)(1.0), c(1.4)) < 1e-15);
  CHECK(dist(c.reversed()(1.0), c(kTwoPi - 1.0)) < 1e-15);
  CHECK(dist(c.covered(3)(0.5), c(1.5)) < 1e-15);
}

TEST_CASE("curve documents round trip") {
  const auto link = catalog("borromean").link;
  const auto path = std::filesystem::temp_directory_path() / "mu3_test_curves.json";
  save_link(path, link, 512);
  const Link back = load_link(path);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (int j = 0; j < 50; ++j) {
      const double t = kTwoPi * (j + 0.5) / 50;
      CHECK(dist(back[i](t), link[i](t)) < 1e-8);
    }
  const auto doc = link_to_json(link, 64);
  CHECK(doc["n_components"] == 3);
  CHECK(doc["n_samples"] == 64);

  std::ofstream(path) << "{\"name\": \"x\", \"n_components\": 2";
  CHECK_THROWS_AS(load_link(path), IoError);
  std::ofstream(path) << R"({"name": "x", "n_components": 1, "n_samples": 4, "samples": [[[1,0,0,0],[0,1,0,0]]]})";
  CHECK_THROWS_AS(load_link(path), IoError);
  std::filesystem::remove(path);
}

}
