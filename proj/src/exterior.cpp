#include "mu3/exterior.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mu3 {

namespace {

// Sign of dx^I ^ dx^J relative to dx^{I u J}: (-1)^(pairs i in I, j in J, i > j).
int wedge_sign(std::uint32_t I, std::uint32_t J) {
  int swaps = 0;
  for (std::uint32_t j = J; j; j &= j - 1) {
    const int idx = std::countr_zero(j);
    swaps += std::popcount(I >> (idx + 1));
  }
  return swaps % 2 ? -1 : 1;
}

}  // namespace

ExteriorForm::ExteriorForm(int dim) : dim_(dim), c_(std::size_t(1) << dim, 0.0) {
  if (dim < 1 || dim > 16) throw std::invalid_argument("exterior algebra dimension must be 1..16");
}

ExteriorForm ExteriorForm::basis(int dim, std::uint32_t mask, double coeff) {
  ExteriorForm f(dim);
  f[mask] = coeff;
  return f;
}

ExteriorForm ExteriorForm::block_volume(int dim, int first, int count) {
  std::uint32_t mask = 0;
  for (int i = first; i < first + count; ++i) mask |= 1u << i;
  return basis(dim, mask);
}

ExteriorForm& ExteriorForm::operator+=(const ExteriorForm& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

ExteriorForm ExteriorForm::operator*(double s) const {
  ExteriorForm f = *this;
  for (double& x : f.c_) x *= s;
  return f;
}

double ExteriorForm::max_abs_difference(const ExteriorForm& o) const {
  double m = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) m = std::max(m, std::abs(c_[i] - o.c_[i]));
  return m;
}

double ExteriorForm::evaluate(const std::vector<std::vector<double>>& vectors) const {
  // Contract with v1 first: f(v1,...,vk) = i_{vk} ... i_{v1} f.
  ExteriorForm f = *this;
  for (const auto& v : vectors) f = interior(v, f);
  return f[0];
}

ExteriorForm wedge(const ExteriorForm& a, const ExteriorForm& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge of forms over different spaces");
  const std::uint32_t n = 1u << a.dim();
  ExteriorForm out(a.dim());
  for (std::uint32_t I = 0; I < n; ++I) {
    if (a[I] == 0.0) continue;
    for (std::uint32_t J = 0; J < n; ++J) {
      if ((I & J) || b[J] == 0.0) continue;
      out[I | J] += wedge_sign(I, J) * a[I] * b[J];
    }
  }
  return out;
}

ExteriorForm interior(const std::vector<double>& v, const ExteriorForm& a) {
  if (static_cast<int>(v.size()) != a.dim()) throw std::invalid_argument("vector length must match dimension");
  const std::uint32_t n = 1u << a.dim();
  ExteriorForm out(a.dim());
  for (std::uint32_t I = 0; I < n; ++I) {
    if (a[I] == 0.0) continue;
    int pos = 0;
    for (std::uint32_t r = I; r; r &= r - 1, ++pos) {
      const int idx = std::countr_zero(r);
      out[I & ~(1u << idx)] += (pos % 2 ? -1.0 : 1.0) * v[idx] * a[I];
    }
  }
  return out;
}

}  // namespace mu3
