#include "qanalysis/dissipative.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qanalysis/hyperop.hpp"

namespace qa {

void DissipativeModel::validate() const {
  check_hermitian(h, "Hamiltonian");
  check_square(lambda, "dissipator");
  if (lambda.rows() != h.rows()) throw DimensionMismatch("H and Lambda dimensions differ");
  if (!(units.hbar > 0.0)) throw DomainViolation("hbar must be positive");
  if (!lambda.allFinite()) throw DomainViolation("dissipator has non-finite entries");
}

Operator DissipativeModel::generator() const { return h / (kI * units.hbar) + lambda; }

Operator DissipativeModel::lambda_at(double s) const {
  const Operator u = unitary_exp(h, -s / units.hbar);  // e^{isH/hbar}
  return u * lambda * u.adjoint();
}

namespace {

std::vector<double> halve(const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(2 * grid.size());
  out.push_back(grid.front());
  for (std::size_t k = 1; k < grid.size(); ++k) {
    out.push_back(0.5 * (grid[k - 1] + grid[k]));
    out.push_back(grid[k]);
  }
  return out;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.size() < 2) throw DomainViolation("grid needs at least two points");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw DomainViolation("grid must be strictly increasing");
}

// Principal log of a matrix whose eigenvalues are positive reals.
Operator positive_log(const Operator& rho, const std::string& what) {
  if (is_hermitian(rho)) {
    const Spectrum s = spectral_decompose(rho);
    if (!(s.min() > 0.0)) {
      std::ostringstream msg;
      msg << what << " has eigenvalue " << s.min() << "; its logarithm is undefined";
      throw LogFailure(msg.str());
    }
    Operator d = Operator::Zero(s.dim(), s.dim());
    for (int k = 0; k < s.dim(); ++k) d(k, k) = std::log(s.eigenvalues(k));
    return s.from_eigenbasis(d);
  }
  Eigen::ComplexEigenSolver<Operator> es(rho);
  const double scale = std::max(1.0, operator_norm(rho));
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const cplx l = es.eigenvalues()(k);
    if (!(l.real() > 0.0) || std::abs(l.imag()) > 1e-10 * scale) {
      std::ostringstream msg;
      msg << what << " has eigenvalue " << l << "; its logarithm is undefined";
      throw LogFailure(msg.str());
    }
  }
  return rho.log();
}

// z / (e^z - 1), limit 1 at 0.
cplx bernoulli_kernel(cplx z) {
  if (std::abs(z) < 1e-4) return 1.0 - z / 2.0 + z * z / 12.0 - z * z * z * z / 720.0;
  return z / (std::exp(z) - 1.0);
}

// P(s) = exp_+(-int_0^s Lambda^dag) on a grid, with off-grid values by one
// partial Magnus step from the grid point below.
class DissipativeFrame {
 public:
  DissipativeFrame(const DissipativeModel& model, std::vector<double> grid)
      : model_(model), grid_(std::move(grid)) {
    source_ = [this](double s) -> Operator { return -model_.lambda_at(s).adjoint(); };
    const int d = static_cast<int>(model_.h.rows());
    p_.push_back(Operator::Identity(d, d));
    for (std::size_t k = 1; k < grid_.size(); ++k)
      p_.push_back(magnus4_step(source_, grid_[k - 1], grid_[k] - grid_[k - 1]) * p_.back());
  }

  const std::vector<double>& grid() const { return grid_; }
  const Operator& p_final() const { return p_.back(); }

  Operator p_at(double s) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), s);
    std::size_t k = it == grid_.begin() ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
    if (k >= p_.size()) k = p_.size() - 1;
    const double h = s - grid_[k];
    if (h == 0.0) return p_[k];
    return magnus4_step(source_, grid_[k], h) * p_[k];
  }

  // L(s) = P(s)^{-1} (Lambda_s + Lambda_s^dag) P(s)
  Operator generator_at(double s) const {
    const Operator p = p_at(s);
    const Operator ls = model_.lambda_at(s);
    return p.partialPivLu().solve(Operator(ls + ls.adjoint())) * p;
  }

 private:
  const DissipativeModel& model_;
  std::vector<double> grid_;
  OperatorSource source_;
  std::vector<Operator> p_;
};

struct FactorPass {
  Factorization f;
  Operator rho;
};

FactorPass factor_pass(const DissipativeModel& model, const Operator& rho0,
                       const std::vector<double>& grid, const Operator& log_rho0) {
  const DissipativeFrame frame(model, grid);
  const double t = grid.back();
  const OperatorSource l = [&](double s) { return frame.generator_at(s); };
  const Operator g_op = ordered_exp_on_grid(l, grid, Ordering::plus);

  FactorPass out;
  Factorization& f = out.f;
  f.t = t;
  f.grid = grid;
  f.p_t = frame.p_final();
  f.q_t = f.p_t.inverse();
  f.g_t = g_op * rho0;
  f.f_t = f.p_t * f.g_t * f.q_t;
  f.lambda_t = model.lambda_at(t);
  f.l_t = frame.generator_at(t);
  const Operator u = unitary_exp(model.h, t / model.units.hbar);  // e^{-itH/hbar}
  f.w_t = u * f.p_t;
  const Operator w_inv = f.q_t * u.adjoint();
  for (double s : grid) f.l_st.push_back(f.w_t * frame.generator_at(s) * w_inv);
  f.rho_t0 = f.w_t * rho0 * w_inv;
  f.eta_t0 = -(f.w_t * log_rho0 * w_inv);
  // exp_+(int L(s, t) ds) = W exp_+(int L(s) ds) W^{-1}
  out.rho = (f.w_t * g_op * w_inv) * f.rho_t0;
  return out;
}

std::vector<double> base_grid(double t, double step) {
  if (!(t > 0.0)) throw DomainViolation("time must be positive");
  if (!(step > 0.0)) throw DomainViolation("step must be positive");
  return uniform_grid(0.0, t, step);
}

}  // namespace

Operator ordered_exp_on_grid(const OperatorSource& a, const std::vector<double>& grid,
                             Ordering direction) {
  check_grid(grid);
  Operator u;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const Operator step = magnus4_step(a, grid[k - 1], grid[k] - grid[k - 1], direction);
    if (k == 1) {
      u = step;
    } else {
      u = direction == Ordering::plus ? Operator(step * u) : Operator(u * step);
    }
  }
  return u;
}

OrderedExpResult ordered_exp_refined(const OperatorSource& a, const std::vector<double>& grid,
                                     Ordering direction, const OrderedExpOptions& opt) {
  check_grid(grid);
  std::vector<double> g = grid;
  Operator coarse = ordered_exp_on_grid(a, g, direction);
  for (int r = 1; r <= opt.max_refinements; ++r) {
    g = halve(g);
    const Operator fine = ordered_exp_on_grid(a, g, direction);
    const double est = (fine - coarse).norm() / 15.0;
    if (est <= opt.tol * std::max(1.0, fine.norm())) return {fine, est, r};
    coarse = fine;
  }
  std::ostringstream msg;
  msg << "ordered exponential did not converge after " << opt.max_refinements << " halvings";
  throw StepFailure(msg.str());
}

Operator ordered_exp(const OperatorSource& a, double t0, double t1, Ordering direction,
                     std::vector<double> grid, const OrderedExpOptions& opt) {
  if (grid.empty()) grid = uniform_grid(t0, t1, 0.05);
  if (grid.front() != t0 || grid.back() != t1)
    throw DomainViolation("ordered_exp grid must span [t0, t1]");
  if (t0 == t1) {
    const Operator probe = a(t0);
    return Operator::Identity(probe.rows(), probe.cols());
  }
  return ordered_exp_refined(a, grid, direction, opt).value;
}

Trajectory master_evolve(const DissipativeModel& model, const Operator& rho0,
                         const std::vector<double>& grid, const StepControl& ctl) {
  model.validate();
  if (rho0.rows() != model.h.rows() || rho0.cols() != model.h.cols())
    throw DimensionMismatch("rho0 and H dimensions differ");
  const Operator k = model.generator();
  const Operator kd = k.adjoint();
  const OperatorRhs rhs = [&](double, const Operator& r) -> Operator { return k * r + r * kd; };
  return integrate_rk4(rhs, rho0, grid, ctl);
}

StructuredSolution structured_solution(const DissipativeModel& model, const Operator& rho0,
                                       double t, const StructuredOptions& opt) {
  model.validate();
  if (rho0.rows() != model.h.rows()) throw DimensionMismatch("rho0 and H dimensions differ");
  const Operator log_rho0 = positive_log(rho0, "rho(0)");
  std::vector<double> grid = base_grid(t, opt.step);
  FactorPass coarse = factor_pass(model, rho0, grid, log_rho0);
  for (int r = 1; r <= opt.max_refinements; ++r) {
    grid = halve(grid);
    FactorPass fine = factor_pass(model, rho0, grid, log_rho0);
    const double est = (fine.rho - coarse.rho).norm() / 15.0;
    if (est <= opt.tol * std::max(1.0, fine.rho.norm())) {
      fine.f.error_estimate = est;
      return {fine.rho, std::move(fine.f)};
    }
    coarse = std::move(fine);
  }
  throw StepFailure("structured solution did not converge under step halving");
}

Operator inverse_dexp(const Operator& phi, const Operator& y) {
  check_square(phi, "Phi");
  const int d = static_cast<int>(phi.rows());
  Eigen::ComplexEigenSolver<Operator> es(phi);
  if (es.info() != Eigen::Success) throw DecompositionFailure("eigen-decomposition of Phi failed");
  const Eigen::VectorXcd ev = es.eigenvalues();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const cplx z = ev(i) - ev(j);
      const double k = std::round(z.imag() / two_pi);
      if (k != 0.0 && std::abs(z - cplx(0.0, two_pi * k)) <= 1e-12) {
        std::ostringstream msg;
        msg << "delta_Phi has eigenvalue " << z << " at 2 pi i * " << k
            << "; z / (e^z - 1) is singular there";
        throw KernelSingularity(msg.str());
      }
    }
  }

  const Operator v = es.eigenvectors();
  const Eigen::PartialPivLU<Operator> lu(v);
  const double cond = operator_norm(v) * operator_norm(lu.inverse());
  if (std::isfinite(cond) && cond < 1e6) {
    Operator yt = lu.solve(Operator(y * v));
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) yt(i, j) *= bernoulli_kernel(ev(i) - ev(j));
    return v * yt * lu.inverse();
  }

  // Defective or nearly so: solve phi1(delta_Phi) X = Y with
  // phi1(M) = (e^M - 1) / M read off exp([[M, 1], [0, 0]]).
  const Operator id = Operator::Identity(d, d);
  const Operator m = Eigen::kroneckerProduct(id, phi).eval() -
                     Eigen::kroneckerProduct(Operator(phi.transpose()), id).eval();
  const int n = d * d;
  Operator block = Operator::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = m;
  block.topRightCorner(n, n) = Operator::Identity(n, n);
  const Operator e = block.exp();
  const Operator phi1 = e.topRightCorner(n, n);
  return unvec(phi1.partialPivLu().solve(vec(y)), d);
}

EntropyOperatorResult entropy_operator(const DissipativeModel& model, const Operator& rho0,
                                       double t, const StructuredOptions& opt) {
  model.validate();
  if (rho0.rows() != model.h.rows()) throw DimensionMismatch("rho0 and H dimensions differ");
  const Operator log_rho0 = positive_log(rho0, "rho(0)");

  auto pass = [&](const std::vector<double>& grid, Operator& phi0) {
    const DissipativeFrame frame(model, grid);
    const Operator u = unitary_exp(model.h, t / model.units.hbar);
    const Operator w = u * frame.p_final();
    const Operator w_inv = frame.p_final().inverse() * u.adjoint();
    phi0 = w * log_rho0 * w_inv;
    const OperatorRhs rhs = [&](double x, const Operator& phi) -> Operator {
      return inverse_dexp(phi, w * frame.generator_at(x) * w_inv);
    };
    Operator phi = phi0;
    for (std::size_t k = 1; k < grid.size(); ++k)
      phi = rk4_step(rhs, grid[k - 1], phi, grid[k] - grid[k - 1]);
    return phi;
  };

  std::vector<double> grid = base_grid(t, opt.step);
  EntropyOperatorResult out;
  Operator coarse = pass(grid, out.phi0);
  for (int r = 1; r <= opt.max_refinements; ++r) {
    grid = halve(grid);
    const Operator fine = pass(grid, out.phi0);
    const double est = (fine - coarse).norm() / 15.0;
    if (est <= opt.tol * std::max(1.0, fine.norm())) {
      out.phi = fine;
      out.eta = -fine;
      out.error_estimate = est;
      out.steps = static_cast<int>(grid.size()) - 1;
      return out;
    }
    coarse = fine;
  }
  throw StepFailure("entropy operator ODE did not converge under step halving");
}

FunctionalDerivativeCheck functional_derivative_check(const OperatorSource& h_of_t,
                                                      const Operator& dh, double t, double t1,
                                                      const std::vector<double>& grid,
                                                      const FunctionalDerivativeOptions& opt) {
  if (!(t > 0.0) || t1 < 0.0 || t1 > t) throw DomainViolation("need 0 <= t1 <= t, t > 0");
  if (!(opt.width > 0.0) || !(opt.kappa > 0.0) || opt.bump_steps < 1)
    throw DomainViolation("bad functional-derivative options");
  check_grid(grid);
  if (grid.front() != 0.0 || grid.back() != t) throw DomainViolation("grid must span [0, t]");
  const double hbar = opt.units.hbar;
  const OperatorSource gen = [&](double s) -> Operator { return h_of_t(s) / (kI * hbar); };

  // Bump [a, b] around t1, clipped to [0, t].
  const double a = std::max(0.0, t1 - 0.5 * opt.width);
  const double b = std::min(t, t1 + 0.5 * opt.width);
  std::vector<double> pts;
  for (double s : grid)
    if (s < a || s > b) pts.push_back(s);
  for (int k = 0; k <= opt.bump_steps; ++k) pts.push_back(a + (b - a) * k / opt.bump_steps);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  FunctionalDerivativeCheck out;
  auto split = [&](double lo, double hi) {
    std::vector<double> g;
    for (double s : pts)
      if (s >= lo && s <= hi) g.push_back(s);
    if (g.front() != lo) g.insert(g.begin(), lo);
    if (g.back() != hi) g.push_back(hi);
    return g;
  };
  const int d = static_cast<int>(dh.rows());
  const Operator id = Operator::Identity(d, d);
  const Operator late = t1 < t ? ordered_exp_refined(gen, split(t1, t), Ordering::plus).value : id;
  const Operator early = t1 > 0.0 ? ordered_exp_refined(gen, split(0.0, t1), Ordering::plus).value : id;
  out.closed_form = late * (dh / (kI * hbar)) * early;

  const double height = 1.0 / (b - a);
  auto perturbed = [&](double k) {
    const OperatorSource g = [&, k](double s) -> Operator {
      Operator x = gen(s);
      if (s >= a && s <= b) x += (k * height / (kI * hbar)) * dh;
      return x;
    };
    return ordered_exp_on_grid(g, pts, Ordering::plus);
  };
  out.finite_difference = (perturbed(opt.kappa) - perturbed(-opt.kappa)) / (2.0 * opt.kappa);
  out.residual = (out.closed_form - out.finite_difference).norm();
  return out;
}

}  // namespace qa
