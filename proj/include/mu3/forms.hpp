#pragma once

// Discrete differential forms on periodic grids: pullback of the normalized
// S^2 area form, the harmonic/exact split on T^3 and the Coulomb-gauge
// potential obtained by FFT.

#include <array>
#include <filesystem>
#include <limits>
#include <vector>

#include "mu3/linkmaps.hpp"

namespace mu3 {

/// 2-form on T^3 stored through its dual vector W with omega = i_W vol:
/// W1 = omega_tu, W2 = omega_us, W3 = omega_st.
struct Form2OnT3 {
  GridShape shape;
  std::array<std::vector<double>, 3> W;
};

enum class Gauge { Coulomb, CoulombPlusClosedShift };

/// 1-form A1 ds + A2 dt + A3 du on T^3.
struct Form1OnT3 {
  GridShape shape;
  std::array<std::vector<double>, 3> A;
  Gauge gauge = Gauge::Coulomb;
};

/// 2-form omega_12 ds ^ dt on T^2.
struct Form2OnT2 {
  int n1 = 0, n2 = 0;
  std::vector<double> w;
};

enum class Differentiation { FourthOrder, Spectral };

/// omega_jk = <F, d_j F x d_k F> / 4pi, so the area form integrates to 1 over S^2.
/// Throws UndersampledField when the field carries the undersampling flag.
Form2OnT3 pullback_area_form(const GridField3& field,
                             Differentiation diff = Differentiation::FourthOrder);
Form2OnT2 pullback_area_form(const GridField2& field,
                             Differentiation diff = Differentiation::FourthOrder);

struct HarmonicPart {
  std::array<double, 3> means{};
  /// means * (2pi)^2: degree of the map on the 2-subtorus transverse to axis i.
  std::array<double, 3> degrees{};
};

HarmonicPart harmonic_part(const Form2OnT3& omega);

inline constexpr double kDefaultTolExact = 5e-2;

/// Coulomb-gauge A with curl A = W - mean(W) spectrally: A^(k) = i k x W^(k) / |k|^2,
/// A^(0) = 0, Nyquist modes dropped. Throws NotExact when some |degree| > tol_exact.
Form1OnT3 solve_potential(const Form2OnT3& omega, double tol_exact = kDefaultTolExact);

/// h_s h_t h_u sum A.W; throws GridMismatch on differing shapes.
double integrate_alpha_wedge_omega(const Form1OnT3& alpha, const Form2OnT3& omega);

/// h1 h2 sum omega_12.
double integrate_form2_on_t2(const Form2OnT2& omega);

/// Spectral derivative of a scalar grid function along one axis.
std::vector<double> spectral_derivative(const std::vector<double>& f, const GridShape& shape, int axis);

/// Spectral divergence sum_i d_i V_i.
std::vector<double> spectral_divergence(const std::array<std::vector<double>, 3>& v, const GridShape& shape);

/// Spectral curl, returned in the same dual-vector convention as Form2OnT3.
Form2OnT3 spectral_curl(const Form1OnT3& alpha);

/// L2 norm of the spectral divergence of W relative to the L2 norm of W.
double closedness_residual(const Form2OnT3& omega);

double l2_norm(const std::array<std::vector<double>, 3>& v);

/// Spectral projection of W onto its divergence-free part (means kept).
Form2OnT3 closed_part(const Form2OnT3& omega);

/// Adds the constant 1-form c1 ds + c2 dt + c3 du.
Form1OnT3 add_closed_shift(Form1OnT3 alpha, const Vec3& c);

/// Adds a closed 1-form given by its components (for instance a gradient).
Form1OnT3 add_closed_form(Form1OnT3 alpha, const std::array<std::vector<double>, 3>& closed);

/// Binary container "MU3F" with the MU3G header layout, then (W1, W2, W3) as
/// little-endian f64 per grid point in index order.
void write_form(const std::filesystem::path& path, const Form2OnT3& omega);
Form2OnT3 read_form(const std::filesystem::path& path);

}  // namespace mu3
