#include "qanalysis/verify/instances.hpp"

#include <Eigen/QR>

namespace qa::verify {

Operator pauli_x() {
  Operator o(2, 2);
  o << 0.0, 1.0, 1.0, 0.0;
  return o;
}

Operator pauli_y() {
  Operator o(2, 2);
  o << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  return o;
}

Operator pauli_z() {
  Operator o(2, 2);
  o << 1.0, 0.0, 0.0, -1.0;
  return o;
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Operator random_operator(int dim, Rng& rng, double scale) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Operator o(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r) o(r, c) = scale * cplx(gauss(rng), gauss(rng));
  return o;
}

Operator random_hermitian(int dim, Rng& rng, double scale) {
  const Operator g = random_operator(dim, rng, scale);
  return 0.5 * (g + g.adjoint());
}

Operator random_unitary(int dim, Rng& rng) {
  const Operator g = random_operator(dim, rng);
  Eigen::HouseholderQR<Operator> qr(g);
  Operator q = qr.householderQ() * Operator::Identity(dim, dim);
  const Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity so the distribution is Haar.
  for (int i = 0; i < dim; ++i) {
    const cplx d = r(i, i);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(i) *= d / mag;
  }
  return q;
}

Operator random_positive(int dim, Rng& rng, double lo, double hi) {
  const Operator u = random_unitary(dim, rng);
  Eigen::VectorXcd lambda(dim);
  for (int i = 0; i < dim; ++i) lambda(i) = uniform(rng, lo, hi);
  const Operator a = u * lambda.asDiagonal() * u.adjoint();
  return 0.5 * (a + a.adjoint());
}

Operator random_density(int dim, Rng& rng, double min_eig) {
  const Operator u = random_unitary(dim, rng);
  Eigen::VectorXd p(dim);
  for (int i = 0; i < dim; ++i) p(i) = uniform(rng, 0.0, 1.0);
  p /= p.sum();
  p = (1.0 - dim * min_eig) * p + Eigen::VectorXd::Constant(dim, min_eig);
  const Operator rho = u * p.cast<cplx>().asDiagonal() * u.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

Operator with_norm(const Operator& o, double norm) {
  const double n = operator_norm(o);
  return n > 0.0 ? Operator(o * (norm / n)) : o;
}

}  // namespace qa::verify
