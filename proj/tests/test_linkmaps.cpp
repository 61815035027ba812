#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "mu3/errors.hpp"
#include "mu3/linkmaps.hpp"

using namespace mu3;

namespace {

Curve chart_circle(const Vec3& c, const Vec3& e1, const Vec3& e2, double r) {
  return Curve::from_chart([=](double t) -> Vec3 { return c + r * (std::cos(t) * e1 + std::sin(t) * e2); },
                           [=](double t) -> Vec3 { return r * (-std::sin(t) * e1 + std::cos(t) * e2); });
}

}  // namespace

TEST_SUITE("linkmaps") {

TEST_CASE("gauss map values are unit and antisymmetric") {
  const auto link = catalog("hopf_plus_unknot").link;
  const GaussMap g(link[1], link[2]), swapped(link[2], link[1]);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double s = 0.31 * i, t = 0.29 * j;
      CHECK(std::abs(g(s, t).norm() - 1.0) < 1e-12);
      CHECK((g(s, t) + swapped(t, s)).norm() < 1e-15);
    }
}

TEST_CASE("distant split pair gives a nearly constant gauss map") {
  const GaussMap g(chart_circle({-3, 0, 0}, Vec3::UnitX(), Vec3::UnitY(), 0.1),
                   chart_circle({3, 0, 0}, Vec3::UnitY(), Vec3::UnitZ(), 0.1));
  const GridField2 f = sample_on_grid(g, 32);
  CHECK(f.max_cell_variation < 0.5);
  CHECK_FALSE(f.undersampled);
}

TEST_CASE("intersecting components are rejected") {
  const Curve c = catalog("borromean").link[0];
  CHECK_THROWS_AS(GaussMap(c, c), ComponentsIntersect);
  const auto b = catalog("borromean").link;
  CHECK_THROWS_AS(ConfMap3(Link{"bad", {b[0], b[1], b[1]}}), ComponentsIntersect);
}

TEST_CASE("conf map restricted to s = const is the gauss map of the translated pair") {
  const auto link = catalog("borromean").link;
  const ConfMap3 F(link);
  for (double s0 : {0.0, 1.1, 3.7}) {
    const S3Isometry g{link[0](s0).inverse(), UnitQuaternion::identity()};
    const GaussMap G(link[2].mapped(g), link[1].mapped(g));
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) {
        const double t = 0.5 * i + 0.1, u = 0.5 * j + 0.2;
        CHECK(std::abs(F(s0, t, u).norm() - 1.0) < 1e-12);
        CHECK((F(s0, t, u) - G(u, t)).norm() < 1e-12);
      }
  }
}

TEST_CASE("sampling layout and undersampling flag") {
  const GridField3 c = sample_on_grid([](double, double, double) { return Vec3(0, 0, 1); }, GridShape::cubic(8));
  REQUIRE(c.values.size() == 512);
  for (const auto& v : c.values) CHECK(v == Vec3(0, 0, 1));

  const ConfMap3 F(catalog("borromean").link);
  const GridField3 f = sample_on_grid(F, 12);
  CHECK((f.at(1, 2, 3) - F(kTwoPi / 12, 2 * kTwoPi / 12, 3 * kTwoPi / 12)).norm() < 1e-15);

  CHECK_FALSE(sample_on_grid(F, 48).undersampled);
  CHECK(sample_on_grid(F, 8).undersampled);
  CHECK_THROWS_AS(sample_on_grid(F, 9), std::invalid_argument);
}

TEST_CASE("unlink of tiny distant components varies little") {
  const ConfMap3 F(catalog("unlink3").link);
  CHECK(sample_on_grid(F, 16).max_cell_variation < 0.5);
}

TEST_CASE("MU3G round trip") {
  const ConfMap3 F(catalog("borromean").link);
  const auto path = std::filesystem::temp_directory_path() / "mu3_test_grid.bin";
  for (GridShape shape : {GridShape::cubic(16), GridShape{32, 16, 16}}) {
    const GridField3 f = sample_on_grid(F, shape);
    write_grid_field(path, f);
    const GridField3 g = read_grid_field(path);
    CHECK(g.shape == f.shape);
    CHECK(g.values == f.values);
  }
  // version 1 header: magic, version, n, axis order, then n^3 triples
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 12 + 4 + 32 * 16 * 16 * 24);
  write_grid_field(path, sample_on_grid(F, 16));
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 4 + 4 + 16 * 16 * 16 * 24);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_grid_field(path), IoError);
}

}
