#pragma once

// Flux formula for third-order helicity and L2 energy of tube fields.

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "mu3/flows/tubes.hpp"

namespace mu3 {

/// (i, j, k) -> mu123 of the i-th handle core of tube 1, j-th of tube 2,
/// k-th of tube 3 (1-based).
using MuTable = std::map<std::array<int, 3>, int>;

/// sum over handles of mu(i,j,k) Phi_1^i Phi_2^j Phi_3^k. Throws
/// IncompleteTable when a handle triple is missing.
double h123_flux_formula(const std::array<std::vector<double>, 3>& handle_fluxes, const MuTable& table);

/// Solid tori: one handle per tube.
double h123_flux_formula(const TubeSystem& system, const MuTable& table);

struct EnergyReport {
  double value = 0.0;
  /// |Q(n) - Q(n/2)|
  double error_estimate = 0.0;
  double monte_carlo = 0.0;
  double monte_carlo_stderr = 0.0;
  int n = 0;
};

/// E2 = integral |B|^2 over the tubes, by quadrature in tube coordinates
/// (trapezoid in theta and phi, Gauss-Legendre in rho split at r0 R) plus a
/// Monte-Carlo cross-check.
EnergyReport energy_l2(const VectorFieldSpec& field, int n = 32, int mc_samples = 20000, std::uint64_t seed = 11);

/// Volume-element-weighted hit rate of uniform box samples landing in tube i,
/// times the box volume.
double monte_carlo_tube_volume(const TubeSystem& system, std::size_t i, int samples, std::uint64_t seed);

}  // namespace mu3
