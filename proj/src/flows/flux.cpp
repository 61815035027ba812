#include "mu3/flows/flux.hpp"

#include <cmath>

#include "mu3/detail/quadrature.hpp"
#include "mu3/errors.hpp"
#include "mu3/flows/ergodic.hpp"

namespace mu3 {

double h123_flux_formula(const std::array<std::vector<double>, 3>& f, const MuTable& table) {
  double total = 0.0;
  for (std::size_t i = 0; i < f[0].size(); ++i) {
    for (std::size_t j = 0; j < f[1].size(); ++j) {
      for (std::size_t k = 0; k < f[2].size(); ++k) {
        const std::array<int, 3> key{int(i) + 1, int(j) + 1, int(k) + 1};
        const auto it = table.find(key);
        if (it == table.end()) {
          throw IncompleteTable("no mu123 entry for handles (" + std::to_string(key[0]) + "," +
                                std::to_string(key[1]) + "," + std::to_string(key[2]) + ")");
        }
        total += it->second * f[0][i] * f[1][j] * f[2][k];
      }
    }
  }
  return total;
}

double h123_flux_formula(const TubeSystem& sys, const MuTable& table) {
  if (sys.size() != 3) throw std::invalid_argument("flux formula needs three tubes");
  return h123_flux_formula({std::vector<double>{sys.fluxes[0]}, {sys.fluxes[1]}, {sys.fluxes[2]}}, table);
}

namespace {

double quadrature(const VectorFieldSpec& field, int n) {
  const TubeSystem& sys = field.system();
  double total = 0.0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const PlanarEllipse& e = sys.tubes[i].core;
    const double R = sys.tubes[i].radius;
    auto [rx, rw] = detail::gauss_legendre(n / 2, 0.0, sys.profile.r0 * R);
    auto [rx2, rw2] = detail::gauss_legendre(n / 2, sys.profile.r0 * R, R);
    rx.insert(rx.end(), rx2.begin(), rx2.end());
    rw.insert(rw.end(), rw2.begin(), rw2.end());
    const int nt = 2 * n, np = n;
    for (int a = 0; a < nt; ++a) {
      const double th = kTwoPi * a / nt;
      const double speed = e.velocity(th).norm(), kappa = e.curvature(th);
      for (std::size_t b = 0; b < rx.size(); ++b) {
        for (int c = 0; c < np; ++c) {
          const double ph = kTwoPi * c / np;
          const TubeCoords tc{static_cast<int>(i), th, rx[b], ph};
          const double J = rx[b] * speed * (1.0 - rx[b] * kappa * std::cos(ph));
          total += rw[b] * (kTwoPi / nt) * (kTwoPi / np) * J * field.eval(field.point(tc)).squaredNorm();
        }
      }
    }
  }
  return total;
}

}  // namespace

EnergyReport energy_l2(const VectorFieldSpec& field, int n, int mc_samples, std::uint64_t seed) {
  EnergyReport r;
  r.n = n;
  r.value = quadrature(field, n);
  r.error_estimate = std::abs(r.value - quadrature(field, n / 2));
  const TubeSystem& sys = field.system();
  double var = 0.0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    auto rng = sample_rng(seed, i);
    const int m = std::max(2, mc_samples / static_cast<int>(sys.size()));
    double s = 0.0, ss = 0.0;
    for (int k = 0; k < m; ++k) {
      const double v = field.eval(field.sample_point(i, rng)).squaredNorm();
      s += v;
      ss += v * v;
    }
    const double vol = field.tube_volume(i);
    const double mean = s / m;
    r.monte_carlo += vol * mean;
    var += vol * vol * std::max(0.0, ss / m - mean * mean) / (m - 1);
  }
  r.monte_carlo_stderr = std::sqrt(var);
  return r;
}

double monte_carlo_tube_volume(const TubeSystem& sys, std::size_t i, int samples, std::uint64_t seed) {
  const PlanarEllipse& e = sys.tubes.at(i).core;
  const double half = std::max(e.a, e.b) + sys.tubes[i].radius;
  auto rng = sample_rng(seed, i);
  std::uniform_real_distribution<double> U(-half, half);
  int hits = 0;
  for (int k = 0; k < samples; ++k) {
    const Vec3 x = e.center + Vec3(U(rng), U(rng), U(rng));
    const TubeCoords c = sys.coords_in_tube(i, x);
    if (c.rho < sys.tubes[i].radius) ++hits;
  }
  return std::pow(2.0 * half, 3) * hits / samples;
}

}  // namespace mu3
