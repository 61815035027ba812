#pragma once

// Thin RAII wrapper over FFTW real-to-complex transforms on periodic 3-grids.

#include <complex>
#include <vector>

#include "mu3/linkmaps.hpp"

namespace mu3 {

/// Forward/inverse real FFT on an (ns, nt, nu) grid. The spectrum is stored
/// half-complex along u: index (i * nt + j) * (nu/2 + 1) + k.
/// inverse() includes the 1/N normalization.
class Fft3 {
 public:
  explicit Fft3(const GridShape& shape);
  ~Fft3();
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;

  const GridShape& shape() const { return shape_; }
  std::size_t spectrum_size() const { return std::size_t(shape_.ns) * shape_.nt * (shape_.nu / 2 + 1); }

  std::vector<std::complex<double>> forward(const std::vector<double>& in) const;
  std::vector<double> inverse(const std::vector<std::complex<double>>& spectrum) const;

  /// Integer wavenumber of index i along an axis of size n, with the Nyquist
  /// mode mapped to 0 so derivatives stay real.
  static int wavenumber(int i, int n) {
    if (2 * i == n) return 0;
    return i < n / 2 ? i : i - n;
  }

 private:
  GridShape shape_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
  double* real_buf_ = nullptr;
  void* complex_buf_ = nullptr;
};

}  // namespace mu3
