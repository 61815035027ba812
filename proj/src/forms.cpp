#include "mu3/forms.hpp"

#include <cmath>
#include <complex>
#include <fstream>

#include "mu3/detail/binary.hpp"
#include "mu3/errors.hpp"
#include "mu3/fft.hpp"
#include "mu3/parallel.hpp"

namespace mu3 {

namespace {

constexpr double kFourPi = 2.0 * kTwoPi;

using Spectrum = std::vector<std::complex<double>>;

// Visits every half-spectrum mode with its wavevector (Nyquist components 0).
template <class F>
void for_each_mode(const GridShape& g, F&& body) {
  const int nk = g.nu / 2 + 1;
  for (int i = 0; i < g.ns; ++i) {
    const int ki = Fft3::wavenumber(i, g.ns);
    for (int j = 0; j < g.nt; ++j) {
      const int kj = Fft3::wavenumber(j, g.nt);
      for (int k = 0; k < nk; ++k) {
        const int kk = Fft3::wavenumber(k, g.nu);
        body((std::size_t(i) * g.nt + j) * nk + k, Vec3(ki, kj, kk));
      }
    }
  }
}

std::array<std::vector<Vec3>, 3> fd4_gradients(const GridField3& f) {
  const GridShape& g = f.shape;
  std::array<std::vector<Vec3>, 3> d;
  for (auto& v : d) v.resize(g.size());
  const double c[3] = {1.0 / (12.0 * g.spacing(0)), 1.0 / (12.0 * g.spacing(1)), 1.0 / (12.0 * g.spacing(2))};
#pragma omp parallel for num_threads(thread_count()) schedule(static)
  for (int i = 0; i < g.ns; ++i) {
    const int ip1 = (i + 1) % g.ns, ip2 = (i + 2) % g.ns;
    const int im1 = (i - 1 + g.ns) % g.ns, im2 = (i - 2 + g.ns) % g.ns;
    for (int j = 0; j < g.nt; ++j) {
      const int jp1 = (j + 1) % g.nt, jp2 = (j + 2) % g.nt;
      const int jm1 = (j - 1 + g.nt) % g.nt, jm2 = (j - 2 + g.nt) % g.nt;
      for (int k = 0; k < g.nu; ++k) {
        const int kp1 = (k + 1) % g.nu, kp2 = (k + 2) % g.nu;
        const int km1 = (k - 1 + g.nu) % g.nu, km2 = (k - 2 + g.nu) % g.nu;
        const std::size_t idx = g.index(i, j, k);
        d[0][idx] = c[0] * (-f.at(ip2, j, k) + 8.0 * f.at(ip1, j, k) - 8.0 * f.at(im1, j, k) + f.at(im2, j, k));
        d[1][idx] = c[1] * (-f.at(i, jp2, k) + 8.0 * f.at(i, jp1, k) - 8.0 * f.at(i, jm1, k) + f.at(i, jm2, k));
        d[2][idx] = c[2] * (-f.at(i, j, kp2) + 8.0 * f.at(i, j, kp1) - 8.0 * f.at(i, j, km1) + f.at(i, j, km2));
      }
    }
  }
  return d;
}

std::array<std::vector<Vec3>, 3> spectral_gradients(const std::vector<Vec3>& values, const GridShape& g) {
  Fft3 fft(g);
  std::array<std::vector<Vec3>, 3> d;
  for (auto& v : d) v.resize(g.size());
  std::vector<double> comp(g.size());
  for (int c = 0; c < 3; ++c) {
    for (std::size_t p = 0; p < g.size(); ++p) comp[p] = values[p][c];
    const Spectrum hat = fft.forward(comp);
    for (int axis = 0; axis < 3; ++axis) {
      Spectrum dh(hat.size());
      for_each_mode(g, [&](std::size_t m, const Vec3& k) { dh[m] = std::complex<double>(0.0, k[axis]) * hat[m]; });
      const auto back = fft.inverse(dh);
      for (std::size_t p = 0; p < g.size(); ++p) d[axis][p][c] = back[p];
    }
  }
  return d;
}

// Sums f(i) for each s-slice in parallel, then adds the slices in order so the
// result does not depend on the thread count.
template <class F>
double ordered_slice_sum(int slices, F&& f) {
  std::vector<double> partial(slices, 0.0);
#pragma omp parallel for num_threads(thread_count()) schedule(static)
  for (int i = 0; i < slices; ++i) partial[i] = f(i);
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

Form2OnT3 pullback_area_form(const GridField3& field, Differentiation diff) {
  if (field.undersampled) {
    throw UndersampledField("max cell variation " + std::to_string(field.max_cell_variation) +
                            " rad exceeds pi/2; refine the grid");
  }
  const GridShape& g = field.shape;
  const auto d = diff == Differentiation::Spectral ? spectral_gradients(field.values, g) : fd4_gradients(field);
  Form2OnT3 out{g, {}};
  for (auto& w : out.W) w.resize(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Vec3& F = field.values[p];
    out.W[0][p] = F.dot(d[1][p].cross(d[2][p])) / kFourPi;
    out.W[1][p] = F.dot(d[2][p].cross(d[0][p])) / kFourPi;
    out.W[2][p] = F.dot(d[0][p].cross(d[1][p])) / kFourPi;
  }
  return out;
}

Form2OnT2 pullback_area_form(const GridField2& field, Differentiation diff) {
  if (field.undersampled) {
    throw UndersampledField("max cell variation " + std::to_string(field.max_cell_variation) +
                            " rad exceeds pi/2; refine the grid");
  }
  const int n1 = field.n1, n2 = field.n2;
  Form2OnT2 out{n1, n2, std::vector<double>(std::size_t(n1) * n2)};
  std::vector<Vec3> d1(out.w.size()), d2(out.w.size());
  if (diff == Differentiation::Spectral) {
    const GridShape g{n1, n2, 1};
    const auto d = spectral_gradients(field.values, g);
    d1 = d[0];
    d2 = d[1];
  } else {
    const double c1 = n1 / (12.0 * kTwoPi), c2 = n2 / (12.0 * kTwoPi);
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) {
        const std::size_t p = std::size_t(i) * n2 + j;
        d1[p] = c1 * (-field.at((i + 2) % n1, j) + 8.0 * field.at((i + 1) % n1, j) -
                      8.0 * field.at((i - 1 + n1) % n1, j) + field.at((i - 2 + n1) % n1, j));
        d2[p] = c2 * (-field.at(i, (j + 2) % n2) + 8.0 * field.at(i, (j + 1) % n2) -
                      8.0 * field.at(i, (j - 1 + n2) % n2) + field.at(i, (j - 2 + n2) % n2));
      }
    }
  }
  for (std::size_t p = 0; p < out.w.size(); ++p) out.w[p] = field.values[p].dot(d1[p].cross(d2[p])) / kFourPi;
  return out;
}

HarmonicPart harmonic_part(const Form2OnT3& omega) {
  HarmonicPart h;
  const GridShape& g = omega.shape;
  const std::size_t slab = std::size_t(g.nt) * g.nu;
  for (int c = 0; c < 3; ++c) {
    const auto& w = omega.W[c];
    const double sum = ordered_slice_sum(g.ns, [&](int i) {
      double s = 0.0;
      for (std::size_t p = i * slab; p < (i + 1) * slab; ++p) s += w[p];
      return s;
    });
    h.means[c] = sum / static_cast<double>(g.size());
    h.degrees[c] = h.means[c] * kTwoPi * kTwoPi;
  }
  return h;
}

Form1OnT3 solve_potential(const Form2OnT3& omega, double tol_exact) {
  const HarmonicPart h = harmonic_part(omega);
  for (int c = 0; c < 3; ++c) {
    if (std::abs(h.degrees[c]) > tol_exact) {
      throw NotExact("harmonic part (" + std::to_string(h.degrees[0]) + ", " + std::to_string(h.degrees[1]) +
                     ", " + std::to_string(h.degrees[2]) +
                     ") is not zero: pairwise linking numbers must vanish for mu123 to be defined");
    }
  }
  const GridShape& g = omega.shape;
  Fft3 fft(g);
  std::array<Spectrum, 3> w;
  for (int c = 0; c < 3; ++c) w[c] = fft.forward(omega.W[c]);
  std::array<Spectrum, 3> a;
  for (auto& x : a) x.assign(fft.spectrum_size(), 0.0);
  const std::complex<double> I(0.0, 1.0);
  for_each_mode(g, [&](std::size_t m, const Vec3& k) {
    const double k2 = k.squaredNorm();
    if (k2 == 0.0) return;
    a[0][m] = I * (k[1] * w[2][m] - k[2] * w[1][m]) / k2;
    a[1][m] = I * (k[2] * w[0][m] - k[0] * w[2][m]) / k2;
    a[2][m] = I * (k[0] * w[1][m] - k[1] * w[0][m]) / k2;
  });
  Form1OnT3 out{g, {}, Gauge::Coulomb};
  for (int c = 0; c < 3; ++c) out.A[c] = fft.inverse(a[c]);
  return out;
}

double integrate_alpha_wedge_omega(const Form1OnT3& alpha, const Form2OnT3& omega) {
  if (!(alpha.shape == omega.shape)) throw GridMismatch("potential and 2-form live on different grids");
  const GridShape& g = omega.shape;
  const std::size_t slab = std::size_t(g.nt) * g.nu;
  const double sum = ordered_slice_sum(g.ns, [&](int i) {
    double s = 0.0;
    for (std::size_t p = i * slab; p < (i + 1) * slab; ++p) {
      s += alpha.A[0][p] * omega.W[0][p] + alpha.A[1][p] * omega.W[1][p] + alpha.A[2][p] * omega.W[2][p];
    }
    return s;
  });
  return sum * g.cell_volume();
}

double integrate_form2_on_t2(const Form2OnT2& omega) {
  double s = 0.0;
  for (double v : omega.w) s += v;
  return s * (kTwoPi / omega.n1) * (kTwoPi / omega.n2);
}

std::vector<double> spectral_derivative(const std::vector<double>& f, const GridShape& shape, int axis) {
  Fft3 fft(shape);
  Spectrum hat = fft.forward(f);
  for_each_mode(shape, [&](std::size_t m, const Vec3& k) { hat[m] *= std::complex<double>(0.0, k[axis]); });
  return fft.inverse(hat);
}

std::vector<double> spectral_divergence(const std::array<std::vector<double>, 3>& v, const GridShape& shape) {
  Fft3 fft(shape);
  Spectrum acc(fft.spectrum_size(), 0.0);
  for (int c = 0; c < 3; ++c) {
    const Spectrum hat = fft.forward(v[c]);
    for_each_mode(shape, [&](std::size_t m, const Vec3& k) { acc[m] += std::complex<double>(0.0, k[c]) * hat[m]; });
  }
  return fft.inverse(acc);
}

Form2OnT3 spectral_curl(const Form1OnT3& alpha) {
  const GridShape& g = alpha.shape;
  Fft3 fft(g);
  std::array<Spectrum, 3> a;
  for (int c = 0; c < 3; ++c) a[c] = fft.forward(alpha.A[c]);
  std::array<Spectrum, 3> w;
  for (auto& x : w) x.assign(fft.spectrum_size(), 0.0);
  const std::complex<double> I(0.0, 1.0);
  for_each_mode(g, [&](std::size_t m, const Vec3& k) {
    w[0][m] = I * (k[1] * a[2][m] - k[2] * a[1][m]);
    w[1][m] = I * (k[2] * a[0][m] - k[0] * a[2][m]);
    w[2][m] = I * (k[0] * a[1][m] - k[1] * a[0][m]);
  });
  Form2OnT3 out{g, {}};
  for (int c = 0; c < 3; ++c) out.W[c] = fft.inverse(w[c]);
  return out;
}

double l2_norm(const std::array<std::vector<double>, 3>& v) {
  double s = 0.0;
  for (const auto& c : v)
    for (double x : c) s += x * x;
  return std::sqrt(s);
}

double closedness_residual(const Form2OnT3& omega) {
  const double norm = l2_norm(omega.W);
  if (norm == 0.0) return 0.0;
  const auto div = spectral_divergence(omega.W, omega.shape);
  double s = 0.0;
  for (double x : div) s += x * x;
  return std::sqrt(s) / norm;
}

Form2OnT3 closed_part(const Form2OnT3& omega) {
  const GridShape& g = omega.shape;
  Fft3 fft(g);
  std::array<Spectrum, 3> w;
  for (int c = 0; c < 3; ++c) w[c] = fft.forward(omega.W[c]);
  for_each_mode(g, [&](std::size_t m, const Vec3& k) {
    const double k2 = k.squaredNorm();
    if (k2 == 0.0) return;
    const std::complex<double> kw = (k[0] * w[0][m] + k[1] * w[1][m] + k[2] * w[2][m]) / k2;
    for (int c = 0; c < 3; ++c) w[c][m] -= k[c] * kw;
  });
  Form2OnT3 out{g, {}};
  for (int c = 0; c < 3; ++c) out.W[c] = fft.inverse(w[c]);
  return out;
}

Form1OnT3 add_closed_shift(Form1OnT3 alpha, const Vec3& c) {
  for (int i = 0; i < 3; ++i)
    for (double& x : alpha.A[i]) x += c[i];
  alpha.gauge = Gauge::CoulombPlusClosedShift;
  return alpha;
}

Form1OnT3 add_closed_form(Form1OnT3 alpha, const std::array<std::vector<double>, 3>& closed) {
  for (int i = 0; i < 3; ++i) {
    if (closed[i].size() != alpha.A[i].size()) throw GridMismatch("closed form has a different grid size");
    for (std::size_t p = 0; p < closed[i].size(); ++p) alpha.A[i][p] += closed[i][p];
  }
  alpha.gauge = Gauge::CoulombPlusClosedShift;
  return alpha;
}

void write_form(const std::filesystem::path& path, const Form2OnT3& omega) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  detail::write_header(out, "MU3F", omega.shape);
  for (std::size_t p = 0; p < omega.shape.size(); ++p)
    for (int c = 0; c < 3; ++c) detail::write_f64(out, omega.W[c][p]);
  if (!out) throw IoError("write failed for " + path.string());
}

Form2OnT3 read_form(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Form2OnT3 omega;
  omega.shape = detail::read_header(in, "MU3F");
  for (auto& w : omega.W) w.resize(omega.shape.size());
  for (std::size_t p = 0; p < omega.shape.size(); ++p)
    for (int c = 0; c < 3; ++c) omega.W[c][p] = detail::read_f64(in);
  return omega;
}

}  // namespace mu3
