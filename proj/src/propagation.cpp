#include "qanalysis/propagation.hpp"

#include <cmath>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

namespace qa {

std::vector<double> uniform_grid(double t0, double t1, double dt) {
  if (!(dt > 0.0) || !(t1 >= t0)) throw DomainViolation("uniform_grid needs dt > 0 and t1 >= t0");
  const long n = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9)));
  std::vector<double> g(n + 1);
  for (long k = 0; k <= n; ++k) g[k] = t0 + (t1 - t0) * static_cast<double>(k) / n;
  g[n] = t1;
  return g;
}

Operator expm_general(const Operator& x) { return x.exp(); }

Operator unitary_exp(const Operator& k, double s) {
  const Spectrum sp = spectral_decompose(hermitian_part(k), 1e-8);
  Eigen::VectorXcd phase(sp.dim());
  for (int i = 0; i < sp.dim(); ++i) phase(i) = std::exp(-kI * (s * sp.eigenvalues(i)));
  return sp.eigenvectors * phase.asDiagonal() * sp.eigenvectors.adjoint();
}

Operator magnus4_step(const OperatorSource& g, double t, double h, Ordering order) {
  const double c = std::sqrt(3.0) / 6.0;
  const Operator g1 = g(t + (0.5 - c) * h);
  const Operator g2 = g(t + (0.5 + c) * h);
  const double sign = order == Ordering::plus ? 1.0 : -1.0;
  const Operator omega =
      0.5 * h * (g1 + g2) + sign * (std::sqrt(3.0) * h * h / 12.0) * (g2 * g1 - g1 * g2);
  // Anti-Hermitian Omega = -i K with K Hermitian.
  const Operator k = kI * omega;
  if (is_hermitian(k, 1e-12)) return unitary_exp(k, 1.0);
  return expm_general(omega);
}

Operator rk4_step(const OperatorRhs& rhs, double t, const Operator& y, double h) {
  const Operator k1 = rhs(t, y);
  const Operator k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
  const Operator k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
  const Operator k4 = rhs(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

std::vector<Operator> rk4_pass(const OperatorRhs& rhs, const Operator& y0,
                               const std::vector<double>& grid, double max_step) {
  std::vector<Operator> out{y0};
  Operator y = y0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double span = grid[k] - grid[k - 1];
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / max_step - 1e-9)));
    const double h = span / n;
    for (int j = 0; j < n; ++j) y = rk4_step(rhs, grid[k - 1] + j * h, y, h);
    out.push_back(y);
  }
  return out;
}

}  // namespace

Trajectory integrate_rk4(const OperatorRhs& rhs, const Operator& y0,
                         const std::vector<double>& grid, const StepControl& ctl) {
  if (grid.empty()) throw DomainViolation("integrate_rk4 needs a non-empty grid");
  double h = ctl.max_step;
  std::vector<Operator> coarse = rk4_pass(rhs, y0, grid, h);
  for (int level = 0; level < ctl.max_refinements; ++level) {
    h *= 0.5;
    std::vector<Operator> fine = rk4_pass(rhs, y0, grid, h);
    double err = 0.0;
    double scale = 1.0;
    for (std::size_t k = 0; k < fine.size(); ++k) {
      err = std::max(err, (fine[k] - coarse[k]).norm() / 15.0);
      scale = std::max(scale, fine[k].norm());
    }
    if (err <= ctl.tol * scale) {
      Trajectory t;
      t.grid = grid;
      t.step = h;
      t.error_estimate = err;
      for (std::size_t k = 0; k < fine.size(); ++k) {
        t.states.push_back((16.0 * fine[k] - coarse[k]) / 15.0);
      }
      return t;
    }
    coarse = std::move(fine);
  }
  std::ostringstream msg;
  msg << "RK4 step halving did not reach tol " << ctl.tol << " at step " << h;
  throw StepFailure(msg.str());
}

}  // namespace qa
