#include "mu3/invariants.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>

#include <Eigen/Dense>

#include "mu3/errors.hpp"

namespace mu3 {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

GridShape pipeline_shape(const PipelineOptions& o) { return GridShape::scaled(o.n, o.multiplicity); }

}  // namespace

InvariantResult InvariantResult::from_raw(double raw, const GridShape& grid) {
  InvariantResult r;
  r.raw = raw;
  r.rounded = std::lround(raw);
  r.residual = std::abs(raw - static_cast<double>(r.rounded));
  r.grid = grid;
  r.grid_n = grid.ns;
  r.flags.indeterminate = !(r.residual < kIndeterminateResidual);
  return r;
}

nlohmann::json to_json(const InvariantResult& r) {
  return {{"raw", r.raw},
          {"rounded", r.rounded},
          {"residual", r.residual},
          {"grid_n", r.grid_n},
          {"grid", {r.grid.ns, r.grid.nt, r.grid.nu}},
          {"flags",
           {{"undersampled", r.flags.undersampled},
            {"not_exact", r.flags.not_exact},
            {"indeterminate", r.flags.indeterminate}}}};
}

InvariantResult linking_number(const Curve& first, const Curve& second, int n) {
  const GaussMap g(first, second);
  const GridField2 field = sample_on_grid(g, n);
  const double raw = integrate_form2_on_t2(pullback_area_form(field));
  InvariantResult r = InvariantResult::from_raw(raw, GridShape{n, n, 1});
  r.grid_n = n;
  return r;
}

InvariantResult linking_number(const Link& two, int n) {
  if (two.size() != 2) throw std::invalid_argument("linking_number needs exactly 2 components");
  return linking_number(two[0], two[1], n);
}

HopfReport hopf_degree_report(const Link& link, const PipelineOptions& opts) {
  HopfReport rep;
  auto t0 = Clock::now();
  const ConfMap3 map(link);
  const GridField3 field = sample_on_grid(map, pipeline_shape(opts));
  rep.timings_ms["sample"] = ms_since(t0);
  rep.max_cell_variation = field.max_cell_variation;

  t0 = Clock::now();
  const Form2OnT3 omega = pullback_area_form(field, opts.diff);
  rep.timings_ms["pullback"] = ms_since(t0);
  rep.harmonic = harmonic_part(omega);
  rep.closedness_residual = closedness_residual(omega);

  t0 = Clock::now();
  const Form1OnT3 alpha = solve_potential(omega, opts.tol_exact);
  rep.timings_ms["solve"] = ms_since(t0);

  t0 = Clock::now();
  const double raw = integrate_alpha_wedge_omega(alpha, closed_part(omega));
  rep.timings_ms["integrate"] = ms_since(t0);

  rep.hopf = InvariantResult::from_raw(raw, field.shape);
  rep.hopf.grid_n = opts.n;
  for (double d : rep.harmonic.degrees) {
    if (std::abs(d) > opts.tol_exact) rep.hopf.flags.not_exact = true;
  }
  if (rep.hopf.flags.not_exact) rep.hopf.flags.indeterminate = true;
  return rep;
}

InvariantResult hopf_degree(const Link& link, const PipelineOptions& opts) {
  return hopf_degree_report(link, opts).hopf;
}

InvariantResult hopf_degree(const Link& link, int n) {
  PipelineOptions o;
  o.n = n;
  return hopf_degree(link, o);
}

InvariantResult mu123_from_hopf(const InvariantResult& hopf) {
  InvariantResult r = InvariantResult::from_raw(hopf.raw / 2.0, hopf.grid);
  r.grid_n = hopf.grid_n;
  r.flags.undersampled = hopf.flags.undersampled;
  r.flags.not_exact = hopf.flags.not_exact;
  r.flags.indeterminate = r.flags.indeterminate || hopf.flags.not_exact;
  return r;
}

InvariantResult mu123(const Link& link, const PipelineOptions& opts) {
  return mu123_from_hopf(hopf_degree(link, opts));
}

InvariantResult mu123(const Link& link, int n) {
  PipelineOptions o;
  o.n = n;
  return mu123(link, o);
}

std::array<InvariantResult, 3> subtorus_degrees(const Link& link, int n) {
  const ConfMap3 map(link);
  // Pair (1,2) lives on T_st (u fixed), (1,3) on T_su, (2,3) on T_tu.
  const int fixed_axis[3] = {2, 1, 0};
  std::array<InvariantResult, 3> out;
  for (int p = 0; p < 3; ++p) {
    const GridField2 f = sample_subtorus(map, fixed_axis[p], 0.0, n);
    out[p] = InvariantResult::from_raw(integrate_form2_on_t2(pullback_area_form(f)), GridShape{n, n, 1});
    out[p].grid_n = n;
  }
  return out;
}

std::array<int, 3> PreimageLink::total_class() const {
  std::array<int, 3> t{};
  for (const auto& c : polylines)
    for (int a = 0; a < 3; ++a) t[a] += c.homology_class[a];
  return t;
}

namespace {

struct Edge {
  int to = -1;
  Vec3 delta;  // grid units, from this node to `to`
  bool forward = true;
};

struct Node {
  Vec3 pos;  // grid units, wrapped into [0, n)
  Edge edges[2];
  int degree = 0;
};

std::uint64_t face_key(std::array<std::uint32_t, 3> ids) {
  std::sort(ids.begin(), ids.end());
  return (std::uint64_t(ids[0]) << 42) | (std::uint64_t(ids[1]) << 21) | std::uint64_t(ids[2]);
}

double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

void tangent_frame(const Vec3& p, Vec3& e1, Vec3& e2) {
  Vec3 a = std::abs(p.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1 = (a - p * p.dot(a)).normalized();
  e2 = p.cross(e1);
}

void check_regular(const GridField3& field, const Vec3& p) {
  const GridShape& g = field.shape;
  for (int i = 0; i < g.ns; ++i) {
    for (int j = 0; j < g.nt; ++j) {
      for (int k = 0; k < g.nu; ++k) {
        const Vec3& F = field.at(i, j, k);
        if (std::atan2(F.cross(p).norm(), F.dot(p)) >= 1e-4) continue;
        const Vec3 ds = (field.at((i + 1) % g.ns, j, k) - field.at((i - 1 + g.ns) % g.ns, j, k)) / (2 * g.spacing(0));
        const Vec3 dt = (field.at(i, (j + 1) % g.nt, k) - field.at(i, (j - 1 + g.nt) % g.nt, k)) / (2 * g.spacing(1));
        const Vec3 du = (field.at(i, j, (k + 1) % g.nu) - field.at(i, j, (k - 1 + g.nu) % g.nu)) / (2 * g.spacing(2));
        const double rank2 = std::max({ds.cross(dt).norm(), dt.cross(du).norm(), du.cross(ds).norm()});
        if (rank2 < 1e-6) throw NotRegularValue("differential nearly singular at a sample mapping onto p");
      }
    }
  }
}

}  // namespace

PreimageLink extract_preimage(const GridField3& field, const Vec3& p_in) {
  const GridShape& g = field.shape;
  if (g.size() >= (std::size_t(1) << 21)) throw std::invalid_argument("preimage extraction supports < 2^21 grid points");
  const Vec3 p = p_in.normalized();
  check_regular(field, p);

  Vec3 e1, e2;
  tangent_frame(p, e1, e2);
  const std::size_t N = g.size();
  std::vector<double> g1(N), g2(N), fp(N);
  for (std::size_t q = 0; q < N; ++q) {
    g1[q] = field.values[q].dot(e1);
    g2[q] = field.values[q].dot(e2);
    fp[q] = field.values[q].dot(p);
  }

  std::vector<Node> nodes;
  std::unordered_map<std::uint64_t, int> node_of;
  const double h[3] = {g.spacing(0), g.spacing(1), g.spacing(2)};
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

  for (int i = 0; i < g.ns; ++i) {
    for (int j = 0; j < g.nt; ++j) {
      for (int k = 0; k < g.nu; ++k) {
        for (const auto& perm : perms) {
          Eigen::Vector3i off[4];
          off[0] = Eigen::Vector3i::Zero();
          off[1] = off[0];
          off[1][perm[0]] = 1;
          off[2] = off[1];
          off[2][perm[1]] = 1;
          off[3] = Eigen::Vector3i::Ones();
          std::array<std::uint32_t, 4> id;
          Vec3 X[4];
          for (int v = 0; v < 4; ++v) {
            const int a = (i + off[v][0]) % g.ns, b = (j + off[v][1]) % g.nt, c = (k + off[v][2]) % g.nu;
            id[v] = static_cast<std::uint32_t>(g.index(a, b, c));
            X[v] = Vec3(i + off[v][0], j + off[v][1], k + off[v][2]);
          }
          bool pos1 = false, neg1 = false, pos2 = false, neg2 = false;
          for (int v = 0; v < 4; ++v) {
            (g1[id[v]] >= 0 ? pos1 : neg1) = true;
            (g2[id[v]] >= 0 ? pos2 : neg2) = true;
          }
          if (!(pos1 && neg1 && pos2 && neg2)) continue;

          // Crossing points on the four faces.
          int hits = 0;
          int hit_node[4];
          Vec3 hit_pos[4];
          for (int skip = 0; skip < 4; ++skip) {
            std::array<int, 3> fv;
            for (int v = 0, m = 0; v < 4; ++v)
              if (v != skip) fv[m++] = v;
            // Same vertex order from both adjacent tetrahedra.
            std::sort(fv.begin(), fv.end(), [&](int x, int y) { return id[x] < id[y]; });
            const double c0 = cross2(g1[id[fv[1]]], g2[id[fv[1]]], g1[id[fv[2]]], g2[id[fv[2]]]);
            const double c1 = cross2(g1[id[fv[2]]], g2[id[fv[2]]], g1[id[fv[0]]], g2[id[fv[0]]]);
            const double c2 = cross2(g1[id[fv[0]]], g2[id[fv[0]]], g1[id[fv[1]]], g2[id[fv[1]]]);
            const bool all_pos = c0 >= 0 && c1 >= 0 && c2 >= 0;
            const bool all_neg = c0 < 0 && c1 < 0 && c2 < 0;
            if (!all_pos && !all_neg) continue;
            const double D = c0 + c1 + c2;
            if (D == 0.0) continue;
            const double l0 = c0 / D, l1 = c1 / D, l2 = c2 / D;
            if (l0 * fp[id[fv[0]]] + l1 * fp[id[fv[1]]] + l2 * fp[id[fv[2]]] <= 0.0) continue;  // antipode -p
            const Vec3 P = l0 * X[fv[0]] + l1 * X[fv[1]] + l2 * X[fv[2]];
            const std::uint64_t key = face_key({id[fv[0]], id[fv[1]], id[fv[2]]});
            auto [it, inserted] = node_of.try_emplace(key, static_cast<int>(nodes.size()));
            if (inserted) {
              Node nd;
              nd.pos = Vec3(std::fmod(P[0], g.ns), std::fmod(P[1], g.nt), std::fmod(P[2], g.nu));
              nodes.push_back(nd);
            }
            if (hits < 4) {
              hit_node[hits] = it->second;
              hit_pos[hits] = P;
            }
            ++hits;
          }
          if (hits == 0) continue;
          if (hits != 2) throw BrokenChain("tetrahedron with " + std::to_string(hits) + " preimage crossings");

          // Orientation from grad g1 x grad g2 (physical coordinates).
          Eigen::Matrix3d M;
          Vec3 r1, r2;
          for (int v = 1; v < 4; ++v) {
            for (int a = 0; a < 3; ++a) M(v - 1, a) = (X[v][a] - X[0][a]) * h[a];
            r1[v - 1] = g1[id[v]] - g1[id[0]];
            r2[v - 1] = g2[id[v]] - g2[id[0]];
          }
          const Eigen::PartialPivLU<Eigen::Matrix3d> lu(M);
          const Vec3 dir = lu.solve(r1).cross(lu.solve(r2));
          Vec3 delta = hit_pos[1] - hit_pos[0];
          const Vec3 phys(delta[0] * h[0], delta[1] * h[1], delta[2] * h[2]);
          const bool fwd = phys.dot(dir) >= 0.0;

          Node& A = nodes[hit_node[0]];
          Node& B = nodes[hit_node[1]];
          if (A.degree >= 2 || B.degree >= 2) throw BrokenChain("preimage crossing shared by more than two tetrahedra");
          A.edges[A.degree++] = Edge{hit_node[1], delta, fwd};
          B.edges[B.degree++] = Edge{hit_node[0], -delta, !fwd};
        }
      }
    }
  }

  PreimageLink out;
  out.regular_value = p;
  std::vector<char> seen(nodes.size(), 0);
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    if (seen[s]) continue;
    if (nodes[s].degree != 2) throw BrokenChain("open preimage chain");
    Polyline poly;
    Vec3 total = Vec3::Zero();
    int cur = static_cast<int>(s);
    int e = nodes[s].edges[0].forward ? 0 : 1;
    while (true) {
      seen[cur] = 1;
      const Node& nd = nodes[cur];
      poly.points.push_back(Vec3(nd.pos[0] * h[0], nd.pos[1] * h[1], nd.pos[2] * h[2]));
      const Edge& ed = nd.edges[e];
      total += ed.delta;
      const int next = ed.to;
      if (next == static_cast<int>(s)) break;
      const Node& nn = nodes[next];
      if (nn.degree != 2) throw BrokenChain("open preimage chain");
      // Leave by the edge that does not lead straight back.
      e = (nn.edges[0].to == cur && (nn.edges[0].delta + ed.delta).norm() < 1e-9) ? 1 : 0;
      cur = next;
      if (poly.points.size() > nodes.size()) throw BrokenChain("preimage chain does not close");
    }
    for (int a = 0; a < 3; ++a) {
      const double w = total[a] / g[a];
      poly.homology_class[a] = static_cast<int>(std::lround(w));
      if (std::abs(w - poly.homology_class[a]) > 1e-6) throw BrokenChain("non-integral wrap count");
    }
    out.polylines.push_back(std::move(poly));
  }
  return out;
}

std::vector<Vec3> perturbed_regular_values(const Vec3& p_in) {
  const Vec3 p = p_in.normalized();
  Vec3 e1, e2;
  tangent_frame(p, e1, e2);
  std::vector<Vec3> out;
  for (int m = 0; m < 12; ++m) {
    const double phi = kTwoPi * m / 12.0 + 0.1;
    const double ang = 1e-2 * (1.0 + 0.25 * (m % 3));
    out.push_back((std::cos(ang) * p + std::sin(ang) * (std::cos(phi) * e1 + std::sin(phi) * e2)).normalized());
  }
  return out;
}

PreimageLink extract_preimage_auto(const GridField3& field, const Vec3& p) {
  try {
    return extract_preimage(field, p);
  } catch (const NotRegularValue&) {
  } catch (const BrokenChain&) {
  }
  for (const Vec3& q : perturbed_regular_values(p)) {
    try {
      return extract_preimage(field, q);
    } catch (const NotRegularValue&) {
    } catch (const BrokenChain&) {
    }
  }
  throw BrokenChain("preimage extraction failed for p and all 12 perturbed values");
}

nlohmann::json to_json(const PreimageLink& pre) {
  nlohmann::json curves = nlohmann::json::array();
  for (const auto& c : pre.polylines) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Vec3& q : c.points) pts.push_back({q[0], q[1], q[2]});
    curves.push_back({{"homology_class", c.homology_class}, {"points", std::move(pts)}});
  }
  const Vec3& p = pre.regular_value;
  return {{"regular_value", {p[0], p[1], p[2]}},
          {"n_polylines", pre.polylines.size()},
          {"total_class", pre.total_class()},
          {"polylines", std::move(curves)}};
}

void write_preimage_csv(const std::filesystem::path& path, const PreimageLink& pre) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "s,t,u\n";
  bool first = true;
  for (const auto& c : pre.polylines) {
    if (!first) out << "nan,nan,nan\n";
    first = false;
    for (const Vec3& q : c.points) out << q[0] << ',' << q[1] << ',' << q[2] << '\n';
    if (!c.points.empty()) out << c.points[0][0] << ',' << c.points[0][1] << ',' << c.points[0][2] << '\n';
  }
}

}  // namespace mu3
