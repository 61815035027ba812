#pragma once

// Monte-Carlo estimators of third-order and pairwise helicity from orbit triples.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "mu3/flows/orbits.hpp"
#include "mu3/flows/tubes.hpp"

namespace mu3 {

enum class EstimatorMode {
  /// mu123 of the closed orbit triple from its windings and the fiber triple:
  /// mu123(orbits) = w1 w2 w3 mu123(fibers).
  Covering,
  /// Pipeline run on the closed orbit curves themselves (small T only).
  Direct,
};

struct EstimatorOptions {
  int samples = 64;
  double T = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 1;
  int grid_n = 48;
  ClosureFamily closure = ClosureFamily::Short;
  EstimatorMode mode = EstimatorMode::Covering;
  /// Fraction of failed samples above which EstimatorUnreliable is thrown.
  double max_skip_fraction = 0.2;
};

struct Estimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  int used = 0;
  int skipped = 0;
  /// Per-sample values (volume product included); NaN marks a skipped sample.
  std::vector<double> values;
};

/// Flow time of `periods` circulations of the slowest core among tubes with
/// nonzero flux; dt resolves the fastest core with `steps_per_period` steps.
struct TimeGrid {
  double T = 0.0;
  double dt = 0.0;
};
TimeGrid time_grid(const VectorFieldSpec& field, double periods, int steps_per_period);

/// Sample k uses mt19937_64 seeded with seed_seq{seed, k} and draws x, y, z
/// from tubes 1, 2, 3 in that order.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

/// vol1 vol2 vol3 mean(mu123(closed orbits) / T^3). Throws EstimatorUnreliable.
Estimate asymptotic_mu123(const VectorFieldSpec& field, const EstimatorOptions& opts);

/// vol_i vol_j mean(lk(closed orbits) / T^2) for tubes i, j (0-based).
Estimate pairwise_helicity(const VectorFieldSpec& field, std::size_t i, std::size_t j, const EstimatorOptions& opts);

/// Pairs (1,2), (1,3), (2,3).
std::array<Estimate, 3> pairwise_helicity_check(const VectorFieldSpec& field, const EstimatorOptions& opts);

/// The three short-path contributions
///   sp1 = T^-3 int_s1 int_O2 int_O3 f,  sp2 = T^-3 int_s1 int_s2 int_O3 f,
///   sp3 = T^-3 int_s1 int_s2 int_s3 f
/// for f = 1 / (1 + |x-y|^2 + |y-z|^2 + |z-x|^2), averaged over `triples`
/// random triples. Orbits are weighted by time, short paths by arc length.
struct ShortPathTerms {
  double sp1 = 0.0, sp2 = 0.0, sp3 = 0.0;
  double mean_closure_length = 0.0;
};
ShortPathTerms short_path_terms(const VectorFieldSpec& field, double T, double dt, std::uint64_t seed,
                                int triples = 16);

}  // namespace mu3
