#include "qanalysis/operator_core.hpp"

#include <cmath>
#include <sstream>

namespace qa {

namespace {

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

double sign_pow(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

Operator identity(int dim) { return Operator::Identity(dim, dim); }

Operator zeros(int dim) { return Operator::Zero(dim, dim); }

Operator dagger(const Operator& o) { return o.adjoint(); }

Operator hermitian_part(const Operator& o) { return 0.5 * (o + o.adjoint()); }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

double hermiticity_defect(const Operator& o) {
  return (o - o.adjoint()).norm() / std::max(1.0, o.norm());
}

bool is_hermitian(const Operator& o, double rel_tol) {
  return o.rows() == o.cols() && hermiticity_defect(o) <= rel_tol;
}

void check_square(const Operator& o, const std::string& what) {
  if (o.rows() != o.cols() || o.rows() == 0) {
    std::ostringstream msg;
    msg << what << ": expected a non-empty square operator, got " << o.rows() << "x" << o.cols();
    throw DimensionMismatch(msg.str());
  }
}

void check_hermitian(const Operator& o, const std::string& what, double rel_tol) {
  check_square(o, what);
  const double defect = hermiticity_defect(o);
  if (defect > rel_tol) {
    std::ostringstream msg;
    msg << what << " is not Hermitian (relative defect " << defect << ")";
    throw NotHermitian(msg.str());
  }
}

double operator_norm(const Operator& o) {
  if (o.size() == 0) return 0.0;
  Eigen::JacobiSVD<Operator> svd(o);
  return svd.singularValues()(0);
}

double frobenius_norm(const Operator& o) { return o.norm(); }

Operator Spectrum::to_eigenbasis(const Operator& x) const {
  return eigenvectors.adjoint() * x * eigenvectors;
}

Operator Spectrum::from_eigenbasis(const Operator& x) const {
  return eigenvectors * x * eigenvectors.adjoint();
}

Operator Spectrum::reconstruct() const {
  return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
}

Spectrum spectral_decompose(const Operator& a, double rel_tol) {
  check_hermitian(a, "spectral_decompose operand", rel_tol);
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success) {
    throw DecompositionFailure("Hermitian eigen-solver did not converge");
  }
  Spectrum s;
  s.eigenvalues = solver.eigenvalues();
  s.eigenvectors = solver.eigenvectors();
  s.source_norm = s.eigenvalues.cwiseAbs().maxCoeff();
  return s;
}

ScalarFunction ScalarFunction::exp_neg() {
  return {Kind::exp_neg, "exp_neg",
          [](int n, double x) { return cplx(sign_pow(n) * std::exp(-x), 0.0); },
          -std::numeric_limits<double>::infinity()};
}

ScalarFunction ScalarFunction::inverse() {
  return {Kind::inverse, "inverse",
          [](int n, double x) {
            return cplx(sign_pow(n) * factorial(n) / std::pow(x, n + 1), 0.0);
          },
          0.0};
}

ScalarFunction ScalarFunction::log() {
  return {Kind::log, "log",
          [](int n, double x) {
            if (n == 0) return cplx(std::log(x), 0.0);
            return cplx(sign_pow(n - 1) * factorial(n - 1) / std::pow(x, n), 0.0);
          },
          0.0};
}

ScalarFunction ScalarFunction::exp_scaled(double c) {
  std::ostringstream name;
  name.precision(17);
  name << "exp_scaled:" << c;
  return {Kind::exp_scaled, name.str(),
          [c](int n, double x) { return cplx(std::pow(c, n) * std::exp(c * x), 0.0); },
          -std::numeric_limits<double>::infinity(), c};
}

ScalarFunction ScalarFunction::custom(std::string name, Derivative derivative, double floor) {
  return {Kind::custom, std::move(name), std::move(derivative), floor};
}

ScalarFunction ScalarFunction::from_name(const std::string& name) {
  if (name == "exp_neg") return exp_neg();
  if (name == "inverse") return inverse();
  if (name == "log") return log();
  const std::string prefix = "exp_scaled:";
  if (name.rfind(prefix, 0) == 0) {
    try {
      return exp_scaled(std::stod(name.substr(prefix.size())));
    } catch (const std::exception&) {
      throw DomainViolation("malformed exp_scaled coefficient in '" + name + "'");
    }
  }
  throw DomainViolation("unknown scalar function '" + name + "'");
}

Operator apply_scalar_function(const Spectrum& s, const ScalarFunction& f, int order) {
  const int d = s.dim();
  Eigen::VectorXcd values(d);
  for (int i = 0; i < d; ++i) {
    const double lambda = s.eigenvalues(i);
    if (!f.admits(lambda)) {
      std::ostringstream msg;
      msg << f.name() << ": eigenvalue " << lambda << " is outside the domain (floor "
          << f.domain_floor() << ")";
      throw DomainViolation(msg.str());
    }
    values(i) = f.derivative(order, lambda);
  }
  return s.eigenvectors * values.asDiagonal() * s.eigenvectors.adjoint();
}

Operator function_of(const ScalarFunction& f, const Operator& a, int order) {
  return apply_scalar_function(spectral_decompose(a), f, order);
}

Operator gateaux_fd(const ScalarFunction& f, const Operator& a, const Operator& b, double h) {
  check_hermitian(a, "gateaux_fd base operator");
  if (b.rows() != a.rows() || b.cols() != a.cols()) {
    throw DimensionMismatch("gateaux_fd: direction has a different shape than the base");
  }
  if (!(h > 0.0)) throw DomainViolation("gateaux_fd: step must be positive");

  auto central = [&](const Operator& dir) -> Operator {
    if (dir.norm() == 0.0) return zeros(static_cast<int>(a.rows()));
    return (function_of(f, a + h * dir) - function_of(f, a - h * dir)) / (2.0 * h);
  };
  const Operator herm = hermitian_part(b);
  const Operator anti = (b - b.adjoint()) / cplx(0.0, 2.0);  // Hermitian
  return central(herm) + kI * central(anti);
}

Eigen::VectorXd boltzmann_weights(const Spectrum& s, double beta) {
  const double e0 = s.min();
  Eigen::VectorXd w(s.dim());
  for (int i = 0; i < s.dim(); ++i) w(i) = std::exp(-beta * (s.eigenvalues(i) - e0));
  return w / w.sum();
}

cplx thermal_average(const Spectrum& s, double beta, const Operator& x) {
  const Eigen::VectorXd w = boltzmann_weights(s, beta);
  const Operator xt = s.to_eigenbasis(x);
  cplx acc = 0.0;
  for (int i = 0; i < s.dim(); ++i) acc += w(i) * xt(i, i);
  return acc;
}

}  // namespace qa
