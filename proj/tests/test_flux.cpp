#include <doctest.h>

#include <cmath>

#include "mu3/errors.hpp"
#include "mu3/flows.hpp"
#include "mu3/invariants.hpp"

using namespace mu3;

namespace {

Vec3 e1_chart(double phi) { return stereographic_projection(catalog("borromean").link[0](phi)); }

}  // namespace

TEST_SUITE("flux") {

TEST_CASE("flux formula for solid tori") {
  const int mu = static_cast<int>(mu123(catalog("borromean").link, 48).rounded);
  REQUIRE(std::abs(mu) == 1);
  const MuTable table{{{1, 1, 1}, mu}};
  CHECK(h123_flux_formula(borromean_tube_system(0.25, {2, 3, 5}), table) == 30.0 * mu);
  CHECK(h123_flux_formula(borromean_tube_system(0.25, {1, 1, 1}), table) == double(mu));
  CHECK(h123_flux_formula(borromean_tube_system(0.25, {0, 1, 1}), table) == 0.0);
  CHECK(h123_flux_formula(borromean_tube_system(0.25, {-1, 1, 1}), table) == -double(mu));
  CHECK_THROWS_AS(h123_flux_formula(borromean_tube_system(0.25, {1, 1, 1}), MuTable{}), IncompleteTable);
}

TEST_CASE("handles with opposite cores cancel") {
  // tube 1 is a band around E1 with two handles: E1 itself and 0.9 E1 run backwards
  const Link base = catalog("borromean").link;
  const Link inner{"inner", {Curve::from_chart([](double t) { return Vec3(0.9 * e1_chart(t)); }).reversed(), base[1],
                             base[2]}};
  const int mu_outer = static_cast<int>(mu123(base, 48).rounded);
  const int mu_inner = static_cast<int>(mu123(inner, 48).rounded);
  CHECK(mu_outer == -mu_inner);

  const MuTable table{{{1, 1, 1}, mu_outer}, {{2, 1, 1}, mu_inner}};
  CHECK(h123_flux_formula({std::vector<double>{1.0, 1.0}, {1.0}, {1.0}}, table) == 0.0);
  CHECK(h123_flux_formula({std::vector<double>{2.0, 1.0}, {1.0}, {3.0}}, table) == 3.0 * mu_outer);
  CHECK_THROWS_AS(h123_flux_formula({std::vector<double>{1.0, 1.0}, {1.0, 1.0}, {1.0}}, table), IncompleteTable);

  // the curve winding once round the band has the summed invariant
  const Curve wound = Curve::from_chart(
      [](double t) { return Vec3((0.95 + 0.05 * std::sin(t)) * e1_chart(M_PI * (1 - std::cos(t)))); });
  const auto r = mu123(Link{"wound", {wound, base[1], base[2]}}, 48);
  CHECK(r.rounded == mu_outer + mu_inner);
  CHECK(std::abs(r.raw) < 0.1);
}

TEST_CASE("energy of tube fields") {
  const auto zero = build_borromean_tubes(0.25, {0, 0, 0});
  const EnergyReport e0 = energy_l2(*zero, 16, 2000);
  CHECK(e0.value == 0.0);
  CHECK(e0.monte_carlo == 0.0);

  const auto one = build_borromean_tubes(0.25, {1, 1, 1});
  const auto two = build_borromean_tubes(0.25, {2, 2, 2});
  const EnergyReport a = energy_l2(*one, 32, 20000);
  const EnergyReport b = energy_l2(*two, 32, 20000);
  CHECK(a.value > 0.0);
  CHECK(std::abs(b.value / a.value - 4.0) < 0.04);
  CHECK(a.error_estimate < 1e-3 * a.value);
  CHECK(std::abs(a.monte_carlo - a.value) < 4 * a.monte_carlo_stderr + 1e-3 * a.value);

  const EnergyReport fine = energy_l2(*one, 64, 2000);
  CHECK(std::abs(fine.value - a.value) < 1e-3 * a.value);
}

TEST_CASE("energy of a single tube matches the closed form for a straight core") {
  // large round core: curvature corrections are O((R/r)^2)
  TubeSystem sys;
  sys.tubes = {Tube{PlanarEllipse{Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 20.0, 20.0}, 0.25}};
  sys.fluxes = {1.0};
  const CirculatingTubeField field(sys);
  const double R = 0.25, L = kTwoPi * 20.0;
  const Profile& p = sys.profile;
  const double C = 1.0 / (kTwoPi * R * R * p.moment());
  double s2 = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double r = (k + 0.5) / n;
    s2 += r * p.value(r) * p.value(r) / n;
  }
  const double straight = C * C * L * kTwoPi * R * R * s2;
  CHECK(std::abs(energy_l2(field, 32, 100).value / straight - 1.0) < 1e-3);
}

}
