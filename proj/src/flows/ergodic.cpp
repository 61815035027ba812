#include "mu3/flows/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mu3/errors.hpp"
#include "mu3/invariants.hpp"
#include "mu3/parallel.hpp"

namespace mu3 {

TimeGrid time_grid(const VectorFieldSpec& field, double periods, int steps_per_period) {
  double slow = 0.0, fast = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < field.system().size(); ++i) {
    const double p = field.core_period(i);
    if (!std::isfinite(p)) continue;
    slow = std::max(slow, p);
    fast = std::min(fast, p);
  }
  if (slow == 0.0) return {periods, 1.0 / steps_per_period};  // no circulation anywhere
  return {periods * slow, fast / steps_per_period};
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

namespace {

void check_options(const EstimatorOptions& o) {
  if (o.samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (!(o.T > 0.0) || !(o.dt > 0.0)) throw std::invalid_argument("T and dt must be positive");
}

Estimate summarize(std::vector<double> values, double max_skip_fraction) {
  Estimate e;
  e.values = std::move(values);
  double sum = 0.0;
  for (double v : e.values) {
    if (std::isnan(v)) {
      ++e.skipped;
    } else {
      ++e.used;
      sum += v;
    }
  }
  if (e.skipped > max_skip_fraction * static_cast<double>(e.values.size()) || e.used == 0) {
    throw EstimatorUnreliable(std::to_string(e.skipped) + " of " + std::to_string(e.values.size()) +
                              " samples failed");
  }
  e.estimate = sum / e.used;
  double ss = 0.0;
  for (double v : e.values)
    if (!std::isnan(v)) ss += (v - e.estimate) * (v - e.estimate);
  e.stderr_ = e.used > 1 ? std::sqrt(ss / (e.used - 1) / e.used) : 0.0;
  return e;
}

ClosedOrbit closed_orbit_from(const VectorFieldSpec& field, const Vec3& x, const EstimatorOptions& o) {
  return close_orbit(integrate_orbit(field, x, o.T, o.dt), field, o.closure);
}

template <class F>
std::vector<double> run_samples(int samples, F&& value_of) {
  std::vector<double> values(samples, std::numeric_limits<double>::quiet_NaN());
  ExceptionCollector errors;
#pragma omp parallel for num_threads(thread_count()) schedule(dynamic)
  for (int k = 0; k < samples; ++k) {
    errors.run([&] {
      try {
        values[k] = value_of(k);
      } catch (const Error&) {
        // Failed pipeline or orbit: counted as skipped.
      }
    });
  }
  errors.rethrow();
  return values;
}

}  // namespace

Estimate asymptotic_mu123(const VectorFieldSpec& field, const EstimatorOptions& o) {
  check_options(o);
  if (field.system().size() != 3) throw std::invalid_argument("asymptotic_mu123 needs exactly three tubes");
  const double vol = field.tube_volume(0) * field.tube_volume(1) * field.tube_volume(2);
  const double T3 = o.T * o.T * o.T;
  auto values = run_samples(o.samples, [&](int k) {
    auto rng = sample_rng(o.seed, k);
    std::array<Vec3, 3> x;
    for (std::size_t i = 0; i < 3; ++i) x[i] = field.sample_point(i, rng);
    std::array<ClosedOrbit, 3> orb;
    for (std::size_t i = 0; i < 3; ++i) orb[i] = closed_orbit_from(field, x[i], o);
    const double wprod = double(orb[0].winding) * orb[1].winding * orb[2].winding;
    if (o.mode == EstimatorMode::Covering) {
      if (wprod == 0.0) return 0.0;
      const Link fibers{"fibers", {field.fiber_curve(x[0]), field.fiber_curve(x[1]), field.fiber_curve(x[2])}};
      PipelineOptions po;
      po.n = o.grid_n;
      return vol * wprod * mu123(fibers, po).raw / T3;
    }
    Link closed{"orbits", {}};
    PipelineOptions po;
    po.n = o.grid_n;
    for (std::size_t i = 0; i < 3; ++i) {
      closed.components.push_back(closed_polyline_curve(orb[i].points));
      po.multiplicity[i] = std::max(1, std::abs(orb[i].winding));
    }
    return vol * mu123(closed, po).raw / T3;
  });
  return summarize(std::move(values), o.max_skip_fraction);
}

Estimate pairwise_helicity(const VectorFieldSpec& field, std::size_t i, std::size_t j, const EstimatorOptions& o) {
  check_options(o);
  const double vol = field.tube_volume(i) * field.tube_volume(j);
  const double T2 = o.T * o.T;
  const int lk_n = std::max(64, 2 * o.grid_n);
  auto values = run_samples(o.samples, [&](int k) {
    auto rng = sample_rng(o.seed, k);
    const Vec3 x = field.sample_point(i, rng);
    const Vec3 y = field.sample_point(j, rng);
    const ClosedOrbit ox = closed_orbit_from(field, x, o);
    const ClosedOrbit oy = closed_orbit_from(field, y, o);
    const double wprod = double(ox.winding) * oy.winding;
    if (o.mode == EstimatorMode::Covering) {
      if (wprod == 0.0) return 0.0;
      return vol * wprod * linking_number(field.fiber_curve(x), field.fiber_curve(y), lk_n).raw / T2;
    }
    const int m = std::max({1, std::abs(ox.winding), std::abs(oy.winding)});
    return vol *
           linking_number(closed_polyline_curve(ox.points), closed_polyline_curve(oy.points), lk_n * m).raw / T2;
  });
  return summarize(std::move(values), o.max_skip_fraction);
}

std::array<Estimate, 3> pairwise_helicity_check(const VectorFieldSpec& field, const EstimatorOptions& o) {
  if (field.system().size() != 3) throw std::invalid_argument("pairwise_helicity_check needs three tubes");
  return {pairwise_helicity(field, 0, 1, o), pairwise_helicity(field, 0, 2, o), pairwise_helicity(field, 1, 2, o)};
}

namespace {

struct Quad {
  std::vector<Vec3> x;
  std::vector<double> w;
};

Quad orbit_nodes(const Orbit& orb) {
  Quad q;
  const std::size_t stride = std::max<std::size_t>(1, orb.points.size() / 256);
  for (std::size_t k = 0; k + 1 < orb.points.size(); k += stride) {
    q.x.push_back(orb.points[k]);
    q.w.push_back(orb.dt * static_cast<double>(std::min(stride, orb.points.size() - 1 - k)));
  }
  return q;
}

Quad path_nodes(const std::vector<Vec3>& path) {
  Quad q;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    q.x.push_back(0.5 * (path[k] + path[k + 1]));
    q.w.push_back((path[k + 1] - path[k]).norm());
  }
  return q;
}

double triple_sum(const Quad& a, const Quad& b, const Quad& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    for (std::size_t j = 0; j < b.x.size(); ++j) {
      const double dab = (a.x[i] - b.x[j]).squaredNorm();
      const double wab = a.w[i] * b.w[j];
      for (std::size_t k = 0; k < c.x.size(); ++k) {
        const double f = 1.0 / (1.0 + dab + (b.x[j] - c.x[k]).squaredNorm() + (c.x[k] - a.x[i]).squaredNorm());
        s += wab * c.w[k] * f;
      }
    }
  }
  return s;
}

}  // namespace

ShortPathTerms short_path_terms(const VectorFieldSpec& field, double T, double dt, std::uint64_t seed, int triples) {
  ShortPathTerms out;
  const double T3 = T * T * T;
  for (int t = 0; t < triples; ++t) {
    auto rng = sample_rng(seed, t);
    std::array<Quad, 3> orbit, sigma;
    for (std::size_t i = 0; i < 3; ++i) {
      const Vec3 x = field.sample_point(i, rng);
      const Orbit orb = integrate_orbit(field, x, T, dt);
      std::vector<Vec3> path{orb.points.back()};
      const auto inner = short_path(field, orb.tube, orb.points.back(), orb.points.front(), ClosureFamily::Short);
      path.insert(path.end(), inner.begin(), inner.end());
      path.push_back(orb.points.front());
      orbit[i] = orbit_nodes(orb);
      sigma[i] = path_nodes(path);
      out.mean_closure_length += polyline_length(path, false) / (3.0 * triples);
    }
    out.sp1 += triple_sum(sigma[0], orbit[1], orbit[2]) / T3 / triples;
    out.sp2 += triple_sum(sigma[0], sigma[1], orbit[2]) / T3 / triples;
    out.sp3 += triple_sum(sigma[0], sigma[1], sigma[2]) / T3 / triples;
  }
  return out;
}

}  // namespace mu3
