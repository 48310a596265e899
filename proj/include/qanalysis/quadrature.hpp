#pragma once

#include <vector>

namespace qa {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Composite Gauss-Legendre: `panels` equal panels on [a, b], `order` points each.
QuadratureRule composite_gauss_legendre(int panels, int order, double a, double b);

}  // namespace qa
