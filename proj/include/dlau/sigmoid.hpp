#pragma once

#include <cmath>

namespace dlau {

/// Logistic function 1/(1+e^-x), evaluated in double without overflow.
inline double sigmoid_exact(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace dlau
