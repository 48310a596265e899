#include "qanalysis/hyperop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

#include "qanalysis/json_io.hpp"

namespace qa {

namespace {

void check_materializable(int dim) {
  if (dim > kMaxMaterializedDim) {
    std::ostringstream msg;
    msg << "hyperoperator materialization is capped at d = " << kMaxMaterializedDim << " (got "
        << dim << "); use the kernel path";
    throw DimensionCap(msg.str());
  }
}

void check_positive(const Spectrum& s, const std::string& what) {
  if (!(s.min() > 0.0)) {
    std::ostringstream msg;
    msg << what << ": operator must be positive definite (min eigenvalue " << s.min() << ")";
    throw DomainViolation(msg.str());
  }
}

void check_same_shape(const Operator& a, const Operator& b, const std::string& what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(what + ": operand shapes differ");
  }
}

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

}  // namespace

Eigen::VectorXcd vec(const Operator& x) {
  return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}

Operator unvec(const Eigen::VectorXcd& v, int dim) {
  return Eigen::Map<const Operator>(v.data(), dim, dim);
}

HyperOperator::HyperOperator(int dim, Eigen::MatrixXcd matrix)
    : dim_(dim), matrix_(std::move(matrix)) {
  if (matrix_.rows() != static_cast<Eigen::Index>(dim) * dim || matrix_.cols() != matrix_.rows()) {
    throw DimensionMismatch("hyperoperator matrix must be d^2 x d^2");
  }
}

HyperOperator HyperOperator::identity(int dim) {
  check_materializable(dim);
  return {dim, Eigen::MatrixXcd::Identity(dim * dim, dim * dim)};
}

HyperOperator HyperOperator::sandwich(const Operator& left, const Operator& right) {
  check_square(left, "sandwich left factor");
  check_same_shape(left, right, "sandwich");
  const int d = static_cast<int>(left.rows());
  check_materializable(d);
  return {d, Eigen::kroneckerProduct(right.transpose(), left).eval()};
}

Operator HyperOperator::apply(const Operator& x) const {
  if (x.rows() != dim_ || x.cols() != dim_) {
    throw DimensionMismatch("hyperoperator applied to an operator of the wrong dimension");
  }
  return unvec(matrix_ * vec(x), dim_);
}

HyperOperator HyperOperator::compose(const HyperOperator& other) const {
  if (other.dim_ != dim_) throw DimensionMismatch("hyperoperator composition dimension mismatch");
  return {dim_, matrix_ * other.matrix_};
}

HyperOperator HyperOperator::operator+(const HyperOperator& o) const {
  if (o.dim_ != dim_) throw DimensionMismatch("hyperoperator sum dimension mismatch");
  return {dim_, matrix_ + o.matrix_};
}

HyperOperator HyperOperator::operator-(const HyperOperator& o) const {
  if (o.dim_ != dim_) throw DimensionMismatch("hyperoperator difference dimension mismatch");
  return {dim_, matrix_ - o.matrix_};
}

HyperOperator HyperOperator::operator*(cplx s) const { return {dim_, matrix_ * s}; }

nlohmann::json hyperop_to_json(const HyperOperator& h) {
  return {{"dim", h.dim()},
          {"matrix", operator_to_json(h.matrix())},
          {"vectorization", "column-stacking"}};
}

HyperOperator hyperop_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("matrix")) {
    throw FormatError("hyperoperator JSON needs 'dim' and 'matrix'");
  }
  if (!j.contains("vectorization")) {
    throw FormatError("hyperoperator JSON is missing the mandatory 'vectorization' tag");
  }
  if (j["vectorization"] != "column-stacking") {
    throw FormatError("unsupported vectorization '" + j["vectorization"].dump() +
                      "'; expected \"column-stacking\"");
  }
  const int d = j["dim"].get<int>();
  Operator m = operator_from_json(j["matrix"]);
  if (m.rows() != static_cast<Eigen::Index>(d) * d) {
    throw FormatError("hyperoperator matrix dimension does not equal dim^2");
  }
  return {d, std::move(m)};
}

Operator DividedDifferenceKernel::apply(const Operator& x) const {
  const Operator xt = base.to_eigenbasis(x);
  return base.from_eigenbasis(table.cwiseProduct(xt));
}

HyperOperator DividedDifferenceKernel::materialize() const {
  const int d = base.dim();
  check_materializable(d);
  const Operator& u = base.eigenvectors;
  // vec(U (K o (U^dag X U)) U^dag) = (conj(U) kron U) diag(vec K) (U^T kron U^dag) vec X
  const Eigen::MatrixXcd to = Eigen::kroneckerProduct(u.transpose(), u.adjoint()).eval();
  const Eigen::MatrixXcd from = Eigen::kroneckerProduct(u.conjugate(), u).eval();
  Eigen::MatrixXcd m = from * vec(table).asDiagonal() * to;
  return {d, std::move(m)};
}

DividedDifferenceKernel first_divided_differences(const Spectrum& s, const ScalarFunction& f,
                                                  double degeneracy_rel) {
  const int d = s.dim();
  const double threshold = degeneracy_rel * std::max(1.0, s.source_norm);
  Eigen::VectorXcd values(d);
  for (int i = 0; i < d; ++i) {
    if (!f.admits(s.eigenvalues(i))) {
      std::ostringstream msg;
      msg << f.name() << ": eigenvalue " << s.eigenvalues(i) << " is outside the domain";
      throw DomainViolation(msg.str());
    }
    values(i) = f(s.eigenvalues(i));
  }
  Eigen::MatrixXcd table(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double li = s.eigenvalues(i);
      const double lj = s.eigenvalues(j);
      if (std::abs(li - lj) < threshold) {
        table(i, j) = f.derivative(1, 0.5 * (li + lj));
      } else {
        table(i, j) = (values(i) - values(j)) / (li - lj);
      }
    }
  }
  return {s, std::move(table)};
}

DividedDifferenceKernel delta_kernel(const Spectrum& s) {
  const int d = s.dim();
  Eigen::MatrixXcd table(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double z = s.eigenvalues(i) - s.eigenvalues(j);
      table(i, j) = std::abs(z) < 1e-8 ? 1.0 + 0.5 * z : std::expm1(z) / z;
    }
  }
  return {s, std::move(table)};
}

HyperOperator inner_derivation(const Operator& a) {
  check_square(a, "inner_derivation operand");
  const int d = static_cast<int>(a.rows());
  check_materializable(d);
  const Operator id = identity(d);
  Eigen::MatrixXcd m = Eigen::kroneckerProduct(id, a).eval() - Eigen::kroneckerProduct(a.transpose(), id).eval();
  return {d, std::move(m)};
}

Operator apply_inner_derivation(const Operator& a, const Operator& q, int power) {
  check_same_shape(a, q, "inner derivation");
  Operator x = q;
  for (int k = 0; k < power; ++k) x = a * x - x * a;
  return x;
}

HyperOperator delta_hyperop(const Operator& a) {
  return delta_kernel(spectral_decompose(a)).materialize();
}

Operator apply_delta(const Operator& a, const Operator& b) {
  check_same_shape(a, b, "Delta(A)");
  return delta_kernel(spectral_decompose(a)).apply(b);
}

HyperOperator quantum_derivative(const ScalarFunction& f, const Operator& a) {
  return first_divided_differences(spectral_decompose(a), f).materialize();
}

Operator quantum_derivative_apply(const ScalarFunction& f, const Operator& a,
                                  const Operator& b) {
  check_same_shape(a, b, "quantum derivative");
  return first_divided_differences(spectral_decompose(a), f).apply(b);
}

Operator d_exp_neg(const Operator& a, const Operator& da) {
  check_same_shape(a, da, "d_exp_neg");
  const Spectrum s = spectral_decompose(a);
  const Operator e = apply_scalar_function(s, ScalarFunction::exp_neg());
  return -e * delta_kernel(s).apply(da);
}

Operator d_inverse(const Operator& a, const Operator& da) {
  check_same_shape(a, da, "d_inverse");
  const Spectrum s = spectral_decompose(a);
  check_positive(s, "d_inverse");
  const Operator inv = apply_scalar_function(s, ScalarFunction::inverse());
  return -inv * da * inv;
}

Operator d_log(const Operator& a, const Operator& da) {
  check_same_shape(a, da, "d_log");
  const Spectrum s = spectral_decompose(a);
  check_positive(s, "d_log");
  return first_divided_differences(s, ScalarFunction::log()).apply(da);
}

Operator series_derivative(const ScalarFunction& f, const Operator& a, const Operator& da,
                           int n_terms) {
  check_same_shape(a, da, "series_derivative");
  if (n_terms < 0) throw DomainViolation("series_derivative: order must be non-negative");
  const Spectrum s = spectral_decompose(a);
  Operator sum = zeros(static_cast<int>(a.rows()));
  Operator power = da;  // delta_A^n dA
  for (int n = 0; n <= n_terms; ++n) {
    const double coeff = ((n % 2 == 0) ? 1.0 : -1.0) / factorial(n + 1);
    sum += coeff * apply_scalar_function(s, f, n + 1) * power;
    power = a * power - power * a;
  }
  return sum;
}

double RootSequence::verdict() const {
  if (terms.empty()) return 0.0;
  const std::size_t first = terms.size() > 3 ? terms.size() - 3 : 0;
  return *std::max_element(terms.begin() + static_cast<std::ptrdiff_t>(first), terms.end());
}

RootSequence alpha_estimate(const Operator& a, const Operator& da, int n_max) {
  check_same_shape(a, da, "alpha_estimate");
  const Spectrum s = spectral_decompose(a);
  check_positive(s, "alpha_estimate");
  const Operator inv = apply_scalar_function(s, ScalarFunction::inverse());
  RootSequence out;
  Operator x = da;
  for (int n = 1; n <= n_max; ++n) {
    x = inv * (a * x - x * a);
    out.terms.push_back(std::pow(operator_norm(x), 1.0 / n));
  }
  return out;
}

RootSequence series_alpha(const ScalarFunction& f, const Operator& a, const Operator& da,
                          int n_max) {
  check_same_shape(a, da, "series_alpha");
  const Spectrum s = spectral_decompose(a);
  RootSequence out;
  Operator x = da;
  for (int n = 1; n <= n_max; ++n) {
    x = a * x - x * a;
    const Operator term = apply_scalar_function(s, f, n + 1) * x / factorial(n + 1);
    out.terms.push_back(std::pow(operator_norm(term), 1.0 / n));
  }
  return out;
}

InequalitySides inequality_check(const Operator& a, const Operator& b, int n) {
  check_same_shape(a, b, "inequality_check");
  if (n < 1) throw DomainViolation("inequality_check: n must be a positive integer");
  const Spectrum s = spectral_decompose(a);
  check_positive(s, "inequality_check");
  const Operator e = apply_scalar_function(s, ScalarFunction::exp_neg());
  const Operator inv = apply_scalar_function(s, ScalarFunction::inverse());

  Operator lhs_op = b;
  Operator rhs_op = b;
  for (int k = 0; k < n; ++k) {
    lhs_op = a * lhs_op - lhs_op * a;
    rhs_op = inv * (a * rhs_op - rhs_op * a);
  }
  const double nn = static_cast<double>(n);
  return {operator_norm(e * lhs_op), std::exp(nn * std::log(nn) - nn) * operator_norm(rhs_op)};
}

CorollaryBound corollary_bound(const Operator& a, const Operator& b, int k_max) {
  check_same_shape(a, b, "corollary_bound");
  if (k_max < 1) throw DomainViolation("corollary_bound: k_max must be >= 1");
  const Spectrum sa = spectral_decompose(a);
  check_positive(sa, "corollary_bound");
  const Spectrum sb = spectral_decompose(b);
  if (sb.min() < -1e-12 * std::max(1.0, sb.source_norm)) {
    std::ostringstream msg;
    msg << "corollary_bound: B must be positive semidefinite (min eigenvalue " << sb.min() << ")";
    throw DomainViolation(msg.str());
  }
  const Operator inv = apply_scalar_function(sa, ScalarFunction::inverse());
  CorollaryBound out;
  for (int k = 1; k <= k_max; ++k) {
    const double p = 1.0 / k;
    const auto root = ScalarFunction::custom(
        "root", [p](int, double x) { return cplx(std::pow(std::max(x, 0.0), p), 0.0); });
    const Operator bk = apply_scalar_function(sb, root);
    const double value = operator_norm(inv * bk * a);
    out.per_k.push_back(value);
    out.m = std::max(out.m, value);
  }
  return out;
}

}  // namespace qa
