#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "mu3/errors.hpp"
#include "mu3/invariants.hpp"
#include "oracles.hpp"

using namespace mu3;

namespace {

int permutation_sign(const std::vector<std::size_t>& p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}

PipelineOptions options_for(const LinkCatalogEntry& e, int n) {
  PipelineOptions o;
  o.n = n;
  o.multiplicity = e.axis_multiplicity;
  return o;
}

// Smooth ambient displacement of the chart, applied to every component.
Link perturbed(const Link& link, double amplitude) {
  Link out{link.name + "~", {}};
  for (const auto& c : link.components) {
    out.components.push_back(Curve::from_chart([c, amplitude](double t) -> Vec3 {
      const Vec3 p = stereographic_projection(c(t));
      return p + amplitude * Vec3(std::sin(2 * p.y() + 0.3), std::cos(p.z() - p.x()), std::sin(p.x() + 3 * p.y()));
    }));
  }
  return out;
}

}  // namespace

TEST_SUITE("invariants") {

TEST_CASE("linking numbers of catalog pairs") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const auto e = catalog(name);
    const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (int k = 0; k < 3; ++k) {
      const auto [i, j] = pairs[k];
      const auto r = linking_number(e.link[i], e.link[j]);
      CHECK(r.rounded == e.expected_pairwise_lk[k]);
      CHECK(r.residual < 1e-3);
      const double gauss =
          oracle::gauss_linking(oracle::chart_polygon(e.link[i], 1500), oracle::chart_polygon(e.link[j], 1500));
      CHECK(std::abs(r.raw + gauss) < 2e-3);
    }
  }
  CHECK_THROWS_AS(linking_number(catalog("borromean").link[0], catalog("borromean").link[0]), ComponentsIntersect);
}

TEST_CASE("hopf degree and mu123 of catalog links") {
  const auto b = hopf_degree(catalog("borromean").link, 48);
  CHECK(std::abs(std::abs(b.raw) - 2.0) < 0.1);
  CHECK(std::abs(b.rounded) == 2);
  CHECK(b.trustworthy());
  const auto m = mu123(catalog("borromean").link, 48);
  CHECK(std::abs(b.raw - 2 * m.raw) == 0.0);
  CHECK(m.rounded == catalog("borromean").expected_mu123.value());

  CHECK(hopf_degree(catalog("unlink3").link, 24).rounded == 0);
  CHECK(std::abs(hopf_degree(catalog("unlink3").link, 24).raw) < 1e-3);

  for (int twist : {2, 3, 5}) {
    CAPTURE(twist);
    const auto e = catalog("borromean_n", twist);
    const auto r = mu123(e.link, options_for(e, 48));
    CHECK(r.rounded == e.expected_mu123.value());
    CHECK(r.residual < 0.15);
    CHECK(r.grid.ns == 48 * twist);
  }
  CHECK_THROWS_AS(hopf_degree(catalog("hopf_plus_unknot").link, 32), NotExact);
  CHECK_THROWS_AS(hopf_degree(catalog("split_hopf").link, 32), NotExact);
  CHECK_THROWS_AS(hopf_degree(catalog("borromean").link, 8), UndersampledField);
}

TEST_CASE("rounding flags") {
  const auto r = InvariantResult::from_raw(1.3, GridShape::cubic(8));
  CHECK(r.rounded == 1);
  CHECK(r.flags.indeterminate);
  CHECK_FALSE(InvariantResult::from_raw(-0.9, GridShape::cubic(8)).flags.indeterminate);
  const auto j = to_json(InvariantResult::from_raw(-0.9, GridShape::cubic(8)));
  CHECK(j["rounded"] == -1);
  CHECK(j.contains("residual"));
}

TEST_CASE("residual decreases under refinement") {
  const auto link = catalog("borromean").link;
  const double r24 = mu123(link, 24).residual, r48 = mu123(link, 48).residual, r96 = mu123(link, 96).residual;
  CHECK(r96 < r48);
  CHECK(r48 < r24);
}

TEST_CASE("component permutations multiply by the sign") {
  const auto link = catalog("borromean").link;
  const long base = mu123(link, 32).rounded;
  std::vector<std::size_t> p{0, 1, 2};
  do {
    CAPTURE(p[0] * 100 + p[1] * 10 + p[2]);
    CHECK(mu123(link.permuted(p), 32).rounded == permutation_sign(p) * base);
  } while (std::next_permutation(p.begin(), p.end()));
}

TEST_CASE("reparametrization and isometry invariance") {
  const auto link = catalog("borromean").link;
  const double base = mu123(link, 32).raw;
  const Link shifted{"shifted", {link[0].shifted(0.7), link[1].shifted(-1.9), link[2].shifted(2.3)}};
  CHECK(mu123(shifted, 32).rounded == std::lround(base));
  CHECK(std::abs(mu123(shifted, 32).raw - base) < 0.05);

  const S3Isometry g{UnitQuaternion{0.8, 0.2, -0.4, 0.4}.normalized(), UnitQuaternion{0.6, -0.3, 0.5, 0.55}.normalized()};
  const auto r = mu123(link.mapped(g), 32);
  CHECK(r.rounded == std::lround(base));
  CHECK(std::abs(r.raw - base) < 0.05);
}

TEST_CASE("small ambient perturbations keep every rounded invariant") {
  // 0.05 of the default tube radius
  for (const char* name : {"borromean", "unlink3", "hopf_plus_unknot"}) {
    CAPTURE(name);
    const auto e = catalog(name);
    const Link p = perturbed(e.link, 0.05 * 0.25);
    CHECK(linking_number(p[1], p[2]).rounded == e.expected_pairwise_lk[2]);
    if (e.expected_mu123) CHECK(mu123(p, 32).rounded == *e.expected_mu123);
  }
}

TEST_CASE("subtorus degrees agree with pairwise linking numbers") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const auto e = catalog(name);
    const auto d = subtorus_degrees(e.link, 128);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(d[k].rounded) == std::abs(e.expected_pairwise_lk[k]));
      CHECK(d[k].residual < 1e-2);
    }
  }
}

TEST_CASE("preimage diagnostics") {
  const GridField3 f = sample_on_grid(ConfMap3(catalog("borromean").link), 48);
  const PreimageLink north = extract_preimage_auto(f);
  CHECK_FALSE(north.polylines.empty());
  CHECK(north.total_class() == std::array<int, 3>{0, 0, 0});
  const PreimageLink generic = extract_preimage_auto(f, Vec3(0.31, -0.21, 0.93).normalized());
  for (const auto& pl : generic.polylines) CHECK(pl.homology_class == std::array<int, 3>{0, 0, 0});

  // polylines close within one cell (consecutive points, wrapped)
  const double cell = kTwoPi / 48;
  for (const auto& pl : north.polylines) {
    for (std::size_t i = 0; i < pl.points.size(); ++i) {
      Vec3 d = pl.points[(i + 1) % pl.points.size()] - pl.points[i];
      for (int a = 0; a < 3; ++a) d[a] -= kTwoPi * std::round(d[a] / kTwoPi);
      CHECK(d.norm() < 2 * cell);
    }
  }

  // count is stable under perturbation of p by 1e-2
  for (const Vec3& p : perturbed_regular_values(Vec3::UnitZ())) {
    CHECK(std::abs(std::acos(p.dot(Vec3::UnitZ())) - 1e-2) < 2e-2);
    try {
      CHECK(extract_preimage(f, p).polylines.size() == north.polylines.size());
    } catch (const NotRegularValue&) {
    } catch (const BrokenChain&) {
    }
  }

  const GridField3 h = sample_on_grid(ConfMap3(catalog("hopf_plus_unknot").link), 48);
  const PreimageLink hp = extract_preimage_auto(h, Vec3(0.31, -0.21, 0.93).normalized());
  bool nonzero = false;
  for (const auto& pl : hp.polylines)
    if (pl.homology_class != std::array<int, 3>{0, 0, 0}) nonzero = true;
  CHECK(nonzero);

  // a field that never reaches -z has an empty preimage there
  const GridField3 flat = sample_on_grid(
      [](double s, double t, double) { return Vec3(0.1 * std::sin(s), 0.1 * std::cos(t), 1.0).normalized(); },
      GridShape::cubic(16));
  CHECK(extract_preimage(flat, -Vec3::UnitZ()).polylines.empty());
}

TEST_CASE("preimage exports") {
  const GridField3 f = sample_on_grid(ConfMap3(catalog("borromean").link), 32);
  const PreimageLink pre = extract_preimage_auto(f);
  const auto j = to_json(pre);
  CHECK(j["polylines"].size() == pre.polylines.size());
  const auto path = std::filesystem::temp_directory_path() / "mu3_test_pre.csv";
  write_preimage_csv(path, pre);
  std::ifstream in(path);
  std::string line;
  std::size_t rows = 0, separators = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find("nan") != std::string::npos) ++separators;
  }
  std::size_t points = 0;
  for (const auto& pl : pre.polylines) points += pl.points.size();
  CHECK(separators + 1 >= pre.polylines.size());
  CHECK(rows >= points + separators);
  std::filesystem::remove(path);
}

}
