#pragma once

// Higher-order quantum derivatives d^n f(A)/dA^n : B^n, the operator Taylor
// expansion, the nonlinear-response expansion of a thermal density and the
// Formula A series with its order-n convergence estimate.

#include <span>
#include <vector>

#include "qanalysis/hyperop.hpp"

namespace qa {

inline constexpr int kDefaultMaxDerivativeOrder = 6;

struct HigherDerivativeRequest {
  ScalarFunction f;
  Operator a;  // Hermitian
  Operator b;
  int order = 1;
  int max_order = kDefaultMaxDerivativeOrder;  // cost grows as d^{order+1}
};

// f[x_0, ..., x_n] by the recursive table on sorted nodes. Node groups whose
// spread is below `threshold` use f^{(k)}(mean) / k!.
cplx divided_difference(const ScalarFunction& f, std::span<const double> nodes, double threshold);

// Complete homogeneous symmetric polynomial h_k(z_0, ..., z_n). This is the
// divided difference of y^{n+k} on the nodes z, evaluated without
// cancellation.
double complete_homogeneous(std::span<const double> z, int k);

// d^n f(A)/dA^n : B^n. In the eigenbasis of A the (i0, in) entry is
// n! sum_{i1..i_{n-1}} f[l_i0, ..., l_in] B_{i0 i1} ... B_{i_{n-1} in}.
Operator higher_derivative_apply(const HigherDerivativeRequest& req);

// sum_{n=0}^{N} x^n / n! d^n f(A)/dA^n : B^n
Operator taylor_sum(const ScalarFunction& f, const Operator& a, const Operator& b, double x,
                    int n_terms);

struct ResponseExpansion {
  std::vector<Operator> terms;  // terms[n] is the n-th order response
  Operator sum() const;
};

// exp(-beta (H - h_ext Q)) expanded in h_ext through order N.
ResponseExpansion nonlinear_response_density(const Operator& h, const Operator& q, double beta,
                                             double h_ext, int n_terms);

// Terms m = 0..M of
//   2 (-1)^m / (m+2)! f^{(m+2)}(A) sum_{k=0}^{m} (d1+d2)^k d1^{m-k} : B.B
// where d1 acts on the first factor and d1 + d2 acts as delta_A on the product.
std::vector<Operator> formula_A_d2_terms(const ScalarFunction& f, const Operator& a,
                                         const Operator& b, int m_max);
Operator formula_A_d2(const ScalarFunction& f, const Operator& a, const Operator& b, int m_max);

// Order-m terms T_m (m = 0..m_max) of the Formula A expansion of d^n f(A)/dA^n : B^n.
// sum_m T_m converges to higher_derivative_apply when the estimate is < 1.
std::vector<Operator> formula_A_terms(const ScalarFunction& f, const Operator& a,
                                      const Operator& b, int n, int m_max);

// ||f^{(n+m)}(A)/m! int_simplex (sum_j t_j d_j)^m : B^n||^{1/m}, m = 1..m_max.
RootSequence alpha_n_estimate(const ScalarFunction& f, const Operator& a, const Operator& b,
                              int n, int m_max);

}  // namespace qa
