#pragma once

// Independent reference computations. None of these route through the
// divided-difference kernels, the series code or the time integrators they
// are used to check.

#include "qanalysis/operator_core.hpp"

namespace qa::verify {

// Pade scaling-and-squaring exponential of a general matrix.
Operator expm(const Operator& x);
// Principal logarithm of a general matrix (Schur-Parlett).
Operator logm(const Operator& x);

// int_0^1 e^{tA} B e^{-tA} dt by n-point Gauss-Legendre.
Operator delta_by_quadrature(const Operator& a, const Operator& b, int points = 64);

struct QuadratureEstimate {
  Operator value;
  double error_budget = 0.0;  // analytic bound on the truncated tail
};

// int_0^inf (t+A)^{-1} B (t+A)^{-1} dt for positive A. Geometric panels up to
// t_max = 1e4 max(1, ||A||); the tail beyond t_max is mapped to u = 1/t and
// integrated too. error_budget is the gap between 24- and 16-point rules.
QuadratureEstimate dlog_by_quadrature(const Operator& a, const Operator& b);

// 2 int_0^1 dt1 int_0^{t1} dt2 f''(A - t1 d1 - t2 d2) : B.B, by tensor
// Gauss-Legendre on the collapsed triangle, evaluated in the eigenbasis of A.
Operator simplex2_by_quadrature(const ScalarFunction& f, const Operator& a, const Operator& b,
                                int points = 40);

// [f(A+hB) - 2 f(A) + f(A-hB)] / h^2 for Hermitian B.
Operator second_central_difference(const ScalarFunction& f, const Operator& a,
                                   const Operator& b, double h);

}  // namespace qa::verify
