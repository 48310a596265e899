#pragma once

// Hyperoperators (linear maps on operators), the inner derivation delta_A,
// the hyperoperator Delta(A) = (e^{delta_A} - 1) / delta_A, first quantum
// derivatives df(A)/dA and their convergence diagnostics.
//
// Vectorization convention (fixed repo-wide): column stacking,
//   vec(X Y Z) = (Z^T kron X) vec(Y).

#include <vector>

#include <json.hpp>

#include "qanalysis/operator_core.hpp"

namespace qa {

// Materialized hyperoperators are d^2 x d^2; beyond this dimension only the
// kernel paths are used.
inline constexpr int kMaxMaterializedDim = 32;

Eigen::VectorXcd vec(const Operator& x);
Operator unvec(const Eigen::VectorXcd& v, int dim);

class HyperOperator {
 public:
  HyperOperator(int dim, Eigen::MatrixXcd matrix);

  static HyperOperator identity(int dim);
  // X -> L X R
  static HyperOperator sandwich(const Operator& left, const Operator& right);

  int dim() const { return dim_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

  Operator apply(const Operator& x) const;
  // (this o other)(X) = this(other(X))
  HyperOperator compose(const HyperOperator& other) const;

  HyperOperator operator+(const HyperOperator& o) const;
  HyperOperator operator-(const HyperOperator& o) const;
  HyperOperator operator*(cplx s) const;

 private:
  int dim_;
  Eigen::MatrixXcd matrix_;
};

nlohmann::json hyperop_to_json(const HyperOperator& h);
HyperOperator hyperop_from_json(const nlohmann::json& j);

// Hyperoperator that is diagonal in the eigenbasis of a Hermitian operator:
// (K X)_{ij} = table_{ij} (U^dag X U)_{ij}, rotated back.
struct DividedDifferenceKernel {
  Spectrum base;
  Eigen::MatrixXcd table;

  Operator apply(const Operator& x) const;
  HyperOperator materialize() const;
};

// table_{ij} = f[lambda_i, lambda_j]; coincident eigenvalues (within
// degeneracy_rel * max(1, ||A||)) use f'((lambda_i + lambda_j) / 2).
DividedDifferenceKernel first_divided_differences(const Spectrum& s, const ScalarFunction& f,
                                                  double degeneracy_rel = Tolerances{}.degeneracy_rel);

// table_{ij} = (e^{z} - 1) / z with z = lambda_i - lambda_j, limit 1 at z = 0.
DividedDifferenceKernel delta_kernel(const Spectrum& s);

// delta_A Q = A Q - Q A
HyperOperator inner_derivation(const Operator& a);
Operator apply_inner_derivation(const Operator& a, const Operator& q, int power = 1);

HyperOperator delta_hyperop(const Operator& a);
Operator apply_delta(const Operator& a, const Operator& b);

// df(A)/dA = delta_{f(A)} / delta_A, realized by first divided differences.
HyperOperator quantum_derivative(const ScalarFunction& f, const Operator& a);
Operator quantum_derivative_apply(const ScalarFunction& f, const Operator& a,
                                  const Operator& b);

// -e^{-A} Delta(A) dA
Operator d_exp_neg(const Operator& a, const Operator& da);
// -(1/A) dA (1/A)
Operator d_inverse(const Operator& a, const Operator& da);
// int_0^inf (t+A)^{-1} dA (t+A)^{-1} dt, evaluated through its divided-difference kernel
Operator d_log(const Operator& a, const Operator& da);

// sum_{n=0}^{N} (-1)^n / (n+1)! f^{(n+1)}(A) delta_A^n dA
Operator series_derivative(const ScalarFunction& f, const Operator& a, const Operator& da,
                           int n_terms);

// Finite sequence of n-th root norms used as a convergence diagnostic. A true
// upper limit is not computable; verdict() is the max of the last three terms.
struct RootSequence {
  std::vector<double> terms;  // terms[k] belongs to index k + 1

  double verdict() const;
  bool predicts_convergence() const { return verdict() < 1.0; }
};

// a_n = ||(A^{-1} delta_A)^n dA||^{1/n}, n = 1..n_max
RootSequence alpha_estimate(const Operator& a, const Operator& da, int n_max);
// ||f^{(n+1)}(A) / (n+1)! delta_A^n dA||^{1/n}, n = 1..n_max
RootSequence series_alpha(const ScalarFunction& f, const Operator& a, const Operator& da,
                          int n_max);

struct InequalitySides {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds(double rel = 1e-12) const { return lhs <= rhs * (1.0 + rel); }
};

// lhs = ||e^{-A} delta_A^n B||, rhs = n^n e^{-n} ||(A^{-1} delta_A)^n B||
InequalitySides inequality_check(const Operator& a, const Operator& b, int n);

struct CorollaryBound {
  double m = 0.0;              // max_k ||A^{-1} B^{1/k} A||
  std::vector<double> per_k;   // k = 1..k_max
  double radius() const { return 1.0 / (m + 1.0); }
};

// Requires B positive semidefinite; B^{1/k} is taken spectrally.
CorollaryBound corollary_bound(const Operator& a, const Operator& b, int k_max);

}  // namespace qa
