#pragma once

// Dense exterior algebra over R^N (N <= 16): a form is a coefficient per
// basis monomial dx^I, I encoded as a bitmask with ascending indices.

#include <cstdint>
#include <vector>

namespace mu3 {

class ExteriorForm {
 public:
  explicit ExteriorForm(int dim);

  static ExteriorForm basis(int dim, std::uint32_t mask, double coeff = 1.0);
  /// dx^{first} ^ ... ^ dx^{first+count-1}.
  static ExteriorForm block_volume(int dim, int first, int count);

  int dim() const { return dim_; }
  double operator[](std::uint32_t mask) const { return c_[mask]; }
  double& operator[](std::uint32_t mask) { return c_[mask]; }
  /// Coefficient of dx^0 ^ ... ^ dx^{N-1}.
  double top() const { return c_.back(); }

  ExteriorForm& operator+=(const ExteriorForm& o);
  ExteriorForm operator*(double s) const;
  double max_abs_difference(const ExteriorForm& o) const;

  /// Evaluates a homogeneous k-form on k vectors (each of length dim).
  double evaluate(const std::vector<std::vector<double>>& vectors) const;

 private:
  int dim_;
  std::vector<double> c_;
};

ExteriorForm wedge(const ExteriorForm& a, const ExteriorForm& b);

/// Interior product i_v, an antiderivation of degree -1.
ExteriorForm interior(const std::vector<double>& v, const ExteriorForm& a);

}  // namespace mu3
