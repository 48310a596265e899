#include "qanalysis/verify/oracles.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "qanalysis/quadrature.hpp"

namespace qa::verify {

Operator expm(const Operator& x) { return x.exp(); }

Operator logm(const Operator& x) { return x.log(); }

Operator delta_by_quadrature(const Operator& a, const Operator& b, int points) {
  const QuadratureRule rule = gauss_legendre(points, 0.0, 1.0);
  Operator acc = Operator::Zero(a.rows(), a.cols());
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double t = rule.nodes[k];
    acc += rule.weights[k] * (expm(t * a) * b * expm(-t * a));
  }
  return acc;
}

namespace {

// int_lo^hi (t+A)^{-1} B (t+A)^{-1} dt on geometric panels, n points each.
Operator resolvent_sandwich(const Operator& a, const Operator& b, double t_max, int n) {
  const int d = static_cast<int>(a.rows());
  const Operator id = Operator::Identity(d, d);
  Operator acc = Operator::Zero(d, d);
  double lo = 0.0;
  double hi = 1.0 / 1024.0;
  while (lo < t_max) {
    hi = std::min(hi, t_max);
    const QuadratureRule rule = gauss_legendre(n, lo, hi);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const Operator r = (rule.nodes[k] * id + a).inverse();
      acc += rule.weights[k] * (r * b * r);
    }
    lo = hi;
    hi *= 2.0;
  }
  // Tail t > t_max with u = 1/t: the integrand becomes (1+uA)^{-1} B (1+uA)^{-1}
  // on [0, 1/t_max], which is smooth.
  const QuadratureRule tail = gauss_legendre(n, 0.0, 1.0 / t_max);
  for (std::size_t k = 0; k < tail.nodes.size(); ++k) {
    const Operator r = (id + tail.nodes[k] * a).inverse();
    acc += tail.weights[k] * (r * b * r);
  }
  return acc;
}

}  // namespace

QuadratureEstimate dlog_by_quadrature(const Operator& a, const Operator& b) {
  const double t_max = 1e4 * std::max(1.0, operator_norm(a));
  const Operator fine = resolvent_sandwich(a, b, t_max, 24);
  const Operator coarse = resolvent_sandwich(a, b, t_max, 16);
  return {fine, (fine - coarse).norm()};
}

Operator simplex2_by_quadrature(const ScalarFunction& f, const Operator& a, const Operator& b,
                                int points) {
  const Spectrum s = spectral_decompose(a);
  const int d = s.dim();
  const Operator bt = s.to_eigenbasis(b);
  const QuadratureRule rule = gauss_legendre(points, 0.0, 1.0);
  Operator out = Operator::Zero(d, d);
  for (int i0 = 0; i0 < d; ++i0) {
    for (int i2 = 0; i2 < d; ++i2) {
      cplx entry = 0.0;
      for (int i1 = 0; i1 < d; ++i1) {
        const cplx weight = bt(i0, i1) * bt(i1, i2);
        if (weight == 0.0) continue;
        const double l0 = s.eigenvalues(i0);
        const double d1 = l0 - s.eigenvalues(i1);
        const double d2 = s.eigenvalues(i1) - s.eigenvalues(i2);
        // Triangle 0 < t2 < t1 < 1 via t1 = u, t2 = u v, Jacobian u.
        cplx integral = 0.0;
        for (std::size_t p = 0; p < rule.nodes.size(); ++p) {
          for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double t1 = rule.nodes[p];
            const double t2 = rule.nodes[p] * rule.nodes[q];
            const double x = l0 - t1 * d1 - t2 * d2;
            integral += rule.weights[p] * rule.weights[q] * t1 * f.derivative(2, x);
          }
        }
        entry += 2.0 * integral * weight;
      }
      out(i0, i2) = entry;
    }
  }
  return s.from_eigenbasis(out);
}

Operator second_central_difference(const ScalarFunction& f, const Operator& a,
                                   const Operator& b, double h) {
  return (function_of(f, a + h * b) - 2.0 * function_of(f, a) + function_of(f, a - h * b)) /
         (h * h);
}

}  // namespace qa::verify
