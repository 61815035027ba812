#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace mu3::detail {

/// Gauss-Legendre nodes and weights on [lo, hi].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double lo, double hi) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p1 = z, p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double half = 0.5 * (hi - lo);
    x[i] = 0.5 * (hi + lo) - half * z;
    w[i] = half * 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

}  // namespace mu3::detail
