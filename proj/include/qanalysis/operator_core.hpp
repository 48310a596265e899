#pragma once

// Dense complex operators, spectral decomposition of Hermitian operators,
// scalar functions lifted to operators, and the central-difference
// directional-derivative oracle.

#include <complex>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "qanalysis/errors.hpp"

namespace qa {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};

// Physical constants. Only hbar appears explicitly in the formulas; k_B is
// absorbed into beta.
struct Units {
  double hbar = 1.0;
};

struct Tolerances {
  // Hermiticity: ||O - O^dag||_F <= hermitian_rel * max(1, ||O||_F).
  double hermitian_rel = 1e-10;
  // Eigenvalues closer than degeneracy_rel * max(1, ||A||) are treated as
  // coincident by divided-difference kernels.
  double degeneracy_rel = 1e-7;
};

Operator identity(int dim);
Operator zeros(int dim);
Operator dagger(const Operator& o);
Operator hermitian_part(const Operator& o);
Operator commutator(const Operator& a, const Operator& b);

// ||O - O^dag||_F relative to max(1, ||O||_F).
double hermiticity_defect(const Operator& o);
bool is_hermitian(const Operator& o, double rel_tol = Tolerances{}.hermitian_rel);
// Throws NotHermitian with `what` in the message.
void check_hermitian(const Operator& o, const std::string& what,
                     double rel_tol = Tolerances{}.hermitian_rel);
void check_square(const Operator& o, const std::string& what);

// Largest singular value.
double operator_norm(const Operator& o);
double frobenius_norm(const Operator& o);

struct Spectrum {
  Eigen::VectorXd eigenvalues;  // ascending
  Operator eigenvectors;        // columns are orthonormal eigenvectors
  double source_norm = 0.0;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  double min() const { return eigenvalues(0); }
  double max() const { return eigenvalues(eigenvalues.size() - 1); }
  double spread() const { return max() - min(); }

  // U^dag X U and U X U^dag.
  Operator to_eigenbasis(const Operator& x) const;
  Operator from_eigenbasis(const Operator& x) const;
  Operator reconstruct() const;
};

Spectrum spectral_decompose(const Operator& a,
                            double rel_tol = Tolerances{}.hermitian_rel);

// f, its derivatives, and the lowest admissible argument. Built-in kinds carry
// closed-form derivatives of every order.
class ScalarFunction {
 public:
  enum class Kind { exp_neg, inverse, log, exp_scaled, custom };

  // derivative(n, x) = f^{(n)}(x)
  using Derivative = std::function<cplx(int, double)>;

  static ScalarFunction exp_neg();
  static ScalarFunction inverse();
  static ScalarFunction log();
  static ScalarFunction exp_scaled(double c);
  static ScalarFunction custom(std::string name, Derivative derivative,
                               double domain_floor = -std::numeric_limits<double>::infinity());
  // Lookup by name: "exp_neg", "inverse", "log", "exp_scaled:<c>".
  static ScalarFunction from_name(const std::string& name);

  cplx operator()(double x) const { return derivative_(0, x); }
  cplx derivative(int n, double x) const { return derivative_(n, x); }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double domain_floor() const { return domain_floor_; }
  double scale() const { return scale_; }
  bool admits(double x) const { return x > domain_floor_; }

 private:
  ScalarFunction(Kind kind, std::string name, Derivative d, double floor, double scale = 1.0)
      : kind_(kind), name_(std::move(name)), derivative_(std::move(d)), domain_floor_(floor),
        scale_(scale) {}

  Kind kind_;
  std::string name_;
  Derivative derivative_;
  double domain_floor_;
  double scale_;
};

// U diag(f^{(order)}(lambda)) U^dag. Throws DomainViolation when an eigenvalue
// is at or below f's domain floor.
Operator apply_scalar_function(const Spectrum& s, const ScalarFunction& f, int order = 0);
Operator function_of(const ScalarFunction& f, const Operator& a, int order = 0);

// [f(A + hB) - f(A - hB)] / (2h). B need not be Hermitian: it is split into
// Hermitian and anti-Hermitian parts and the result is assembled by linearity.
Operator gateaux_fd(const ScalarFunction& f, const Operator& a, const Operator& b,
                    double h = 1e-6);

// Thermal helpers shared by the response modules.
Eigen::VectorXd boltzmann_weights(const Spectrum& s, double beta);
cplx thermal_average(const Spectrum& s, double beta, const Operator& x);

}  // namespace qa
