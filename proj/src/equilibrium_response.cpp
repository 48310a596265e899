#include "qanalysis/equilibrium_response.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qanalysis/hyperop.hpp"
#include "qanalysis/quadrature.hpp"

namespace qa {

namespace {

// w_m (e^x - 1) / x with x = beta (E_m - E_n), written through w_n where it
// cannot overflow.
double line_weight(double wm, double wn, double x) {
  if (x == 0.0) return wm;
  if (std::abs(x) < 1e-4) return wm * std::expm1(x) / x;
  return (wn - wm) / x;
}

}  // namespace

ResponseSetup::ResponseSetup(Operator h, Operator j, double beta, double epsilon, Units units)
    : h_(std::move(h)), j_(std::move(j)), beta_(beta), epsilon_(epsilon), units_(units) {
  check_hermitian(h_, "Hamiltonian");
  check_hermitian(j_, "current");
  if (j_.rows() != h_.rows()) throw DimensionMismatch("H and J dimensions differ");
  if (!(beta_ > 0.0)) throw DomainViolation("beta must be positive");
  if (!(epsilon_ > 0.0)) throw DomainViolation("epsilon must be positive");
  if (!(units_.hbar > 0.0)) throw DomainViolation("hbar must be positive");
  spectrum_ = spectral_decompose(h_);
  weights_ = boltzmann_weights(spectrum_, beta_);
  j_mean_ = thermal_average(spectrum_, beta_, j_).real();
  j_ -= j_mean_ * Operator::Identity(j_.rows(), j_.cols());

  const int d = spectrum_.dim();
  const Operator jt = spectrum_.to_eigenbasis(j_);
  line_weights_.resize(d, d);
  line_freq_.resize(d, d);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      const double em = spectrum_.eigenvalues(m);
      const double en = spectrum_.eigenvalues(n);
      line_weights_(m, n) = line_weight(weights_(m), weights_(n), beta_ * (em - en)) *
                            std::norm(jt(m, n));
      line_freq_(m, n) = (en - em) / units_.hbar;
    }
  }
}

ResponseSetup ResponseSetup::with_epsilon(double epsilon) const {
  ResponseSetup out = *this;
  if (!(epsilon > 0.0)) throw DomainViolation("epsilon must be positive");
  out.epsilon_ = epsilon;
  return out;
}

cplx ResponseSetup::average(const Operator& x) const {
  const Operator xt = spectrum_.to_eigenbasis(x);
  cplx acc = 0.0;
  for (int m = 0; m < spectrum_.dim(); ++m) acc += weights_(m) * xt(m, m);
  return acc;
}

std::string method_name(ConductivityResult::Method m) {
  switch (m) {
    case ConductivityResult::Method::resolvent: return "resolvent";
    case ConductivityResult::Method::series: return "series";
    case ConductivityResult::Method::time_integral: return "time-integral";
    case ConductivityResult::Method::large_omega: return "large-omega";
  }
  return "unknown";
}

Operator dressed_current(const ResponseSetup& setup) {
  return apply_delta(setup.beta() * setup.h(), setup.j());
}

cplx canonical_correlation(const ResponseSetup& setup, double t) {
  const Spectrum& s = setup.spectrum();
  const Operator dj = s.to_eigenbasis(dressed_current(setup));
  const Operator jt = s.to_eigenbasis(setup.j());
  const int d = s.dim();
  // J(t)_nm = J_nm e^{it(E_n - E_m)/hbar}
  cplx acc = 0.0;
  for (int m = 0; m < d; ++m) {
    cplx row = 0.0;
    for (int n = 0; n < d; ++n) {
      const double w = (s.eigenvalues(n) - s.eigenvalues(m)) / setup.units().hbar;
      row += dj(m, n) * jt(n, m) * std::exp(kI * (t * w));
    }
    acc += setup.weights()(m) * row;
  }
  return acc;
}

ConductivityResult conductivity(const ResponseSetup& setup, double omega) {
  const Eigen::MatrixXd& c = setup.line_weights();
  const Eigen::MatrixXd& w = setup.line_frequencies();
  cplx acc = 0.0;
  for (Eigen::Index n = 0; n < c.cols(); ++n)
    for (Eigen::Index m = 0; m < c.rows(); ++m)
      if (c(m, n) != 0.0) acc += c(m, n) / (setup.epsilon() + kI * (omega - w(m, n)));
  ConductivityResult out;
  out.omega = omega;
  out.sigma = setup.beta() * acc;
  out.method = ConductivityResult::Method::resolvent;
  out.epsilon = setup.epsilon();
  return out;
}

std::vector<ConductivityResult> conductivity_scan(const ResponseSetup& setup,
                                                  const std::vector<double>& omegas) {
  std::vector<ConductivityResult> out;
  out.reserve(omegas.size());
  for (double w : omegas) out.push_back(conductivity(setup, w));
  return out;
}

ConductivityResult conductivity_time_integral(const ResponseSetup& setup, double omega,
                                              const TimeIntegralOptions& opt) {
  if (opt.order < 4 || !(opt.decay > 0.0)) throw DomainViolation("bad time-integral options");
  const double eps = setup.epsilon();
  const double s_max = opt.decay / eps;

  // Keep the lines with weight; the integrand oscillates at most at
  // max |w - omega|, and each panel covers half a period of that.
  std::vector<double> cw, fw;
  const Eigen::MatrixXd& c = setup.line_weights();
  const Eigen::MatrixXd& w = setup.line_frequencies();
  double fastest = std::abs(omega);
  for (Eigen::Index n = 0; n < c.cols(); ++n) {
    for (Eigen::Index m = 0; m < c.rows(); ++m) {
      if (c(m, n) == 0.0) continue;
      cw.push_back(c(m, n));
      fw.push_back(w(m, n) - omega);
      fastest = std::max(fastest, std::abs(w(m, n) - omega));
    }
  }
  const double width = std::min(2.0, std::numbers::pi / std::max(fastest, 1e-12));
  const int panels = static_cast<int>(std::ceil(s_max / width));

  auto integrate = [&](int order) {
    const QuadratureRule rule = composite_gauss_legendre(panels, order, 0.0, s_max);
    cplx acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = rule.nodes[q];
      cplx corr = 0.0;
      for (std::size_t k = 0; k < cw.size(); ++k) corr += cw[k] * std::exp(kI * (s * fw[k]));
      acc += rule.weights[q] * std::exp(-eps * s) * corr;
    }
    return setup.beta() * acc;
  };

  ConductivityResult out;
  out.omega = omega;
  out.method = ConductivityResult::Method::time_integral;
  out.epsilon = eps;
  out.sigma = integrate(opt.order);
  out.error_estimate = std::abs(out.sigma - integrate(opt.order - 4));
  return out;
}

ConductivityResult conductivity_series(const ResponseSetup& setup, double omega, int n_max,
                                       bool regularized) {
  if (n_max < 0) throw DomainViolation("series order must be >= 0");
  const cplx z = regularized ? cplx(omega, -setup.epsilon()) : cplx(omega, 0.0);
  if (std::abs(z) == 0.0) throw DivergenceWarning("conductivity series at omega = 0");
  // Lines at round-off level (a conserved J) do not set the radius.
  double fastest = 0.0;
  const Eigen::MatrixXd& c = setup.line_weights();
  const double floor = 1e-24 * c.maxCoeff();
  for (Eigen::Index n = 0; n < c.cols(); ++n)
    for (Eigen::Index m = 0; m < c.rows(); ++m)
      if (c(m, n) > floor)
        fastest = std::max(fastest, std::abs(setup.line_frequencies()(m, n)));
  const double ratio = fastest / std::abs(z);
  if (ratio >= 1.0) {
    std::ostringstream msg;
    msg << "conductivity series diverges: term ratio " << ratio << " at omega " << omega;
    throw DivergenceWarning(msg.str());
  }

  const Operator dj = dressed_current(setup);
  const cplx lead = setup.beta() / (kI * z);
  const cplx scale = 1.0 / (setup.units().hbar * z);
  Operator x = setup.j();
  cplx acc = 0.0;
  cplx last = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) x = scale * commutator(setup.h(), x);
    last = lead * setup.average(dj * x);
    acc += last;
  }
  ConductivityResult out;
  out.omega = omega;
  out.sigma = acc;
  out.method = ConductivityResult::Method::series;
  out.order = n_max;
  out.epsilon = setup.epsilon();
  out.error_estimate = std::abs(last) * ratio / (1.0 - ratio);
  return out;
}

ConductivityResult large_omega(const ResponseSetup& setup, double omega) {
  if (omega == 0.0) throw DomainViolation("large-omega form at omega = 0");
  ConductivityResult out;
  out.omega = omega;
  out.sigma = setup.beta() * setup.average(dressed_current(setup) * setup.j()) / (kI * omega);
  out.method = ConductivityResult::Method::large_omega;
  out.epsilon = setup.epsilon();
  return out;
}

double ErgodicDecomposition::drude_weight(double beta) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * a[k] * norms[k];
  return beta * acc;
}

ErgodicDecomposition ergodic_decomposition(const ResponseSetup& setup,
                                           const std::vector<Operator>& constants, double tol) {
  const Operator& h = setup.h();
  const int d = static_cast<int>(h.rows());
  const double h_norm = operator_norm(h);
  std::vector<Operator> centered;
  for (std::size_t k = 0; k < constants.size(); ++k) {
    const Operator& c = constants[k];
    check_hermitian(c, "conserved quantity");
    if (c.rows() != d) throw DimensionMismatch("conserved quantity and H dimensions differ");
    const double defect = operator_norm(commutator(c, h));
    if (defect > tol * std::max(1.0, operator_norm(c) * h_norm)) {
      std::ostringstream msg;
      msg << "conserved quantity " << k << " does not commute with H: ||[H_j, H]|| = " << defect;
      throw NotConserved(msg.str());
    }
    centered.push_back(c - setup.average(c).real() * Operator::Identity(d, d));
  }

  ErgodicDecomposition out;
  const std::size_t q = centered.size();
  Eigen::MatrixXd gram(q, q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t k = 0; k < q; ++k)
      gram(i, k) = setup.average(centered[i] * centered[k]).real();
  for (std::size_t i = 0; i < q; ++i) {
    if (!(gram(i, i) > 0.0)) {
      std::ostringstream msg;
      msg << "conserved quantity " << i << " has no thermal variance";
      throw DomainViolation(msg.str());
    }
  }
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t k = i + 1; k < q; ++k) {
      const double overlap = std::abs(gram(i, k)) / std::sqrt(gram(i, i) * gram(k, k));
      if (overlap > tol) {
        std::ostringstream msg;
        msg << "conserved quantities " << i << " and " << k << " overlap: " << overlap;
        throw NotOrthogonal(msg.str());
      }
    }
  }

  Operator rest = setup.j();
  for (std::size_t i = 0; i < q; ++i) {
    const double a = setup.average(setup.j() * centered[i]).real() / gram(i, i);
    out.a.push_back(a);
    out.norms.push_back(gram(i, i));
    rest -= a * centered[i];
  }

  // Split off whatever still sits in the energy-diagonal blocks.
  const Spectrum& s = setup.spectrum();
  const double thr = 1e-9 * h_norm;
  Operator rt = s.to_eigenbasis(rest);
  Operator diag = Operator::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    for (int m = 0; m < d; ++m) {
      if (std::abs(s.eigenvalues(m) - s.eigenvalues(n)) <= thr) {
        diag(m, n) = rt(m, n);
        rt(m, n) = 0.0;
      }
    }
  }
  out.j_prime = s.from_eigenbasis(rt);
  out.diagonal_remainder = s.from_eigenbasis(diag);
  out.projection_norm = operator_norm(out.diagonal_remainder);
  return out;
}

DivergenceScan sigma0_divergence_scan(const ResponseSetup& setup,
                                      const std::vector<double>& eps_list) {
  if (eps_list.size() < 2) throw FitFailure("divergence scan needs at least two eps values");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0)) throw FitFailure("eps values must be positive");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
      throw FitFailure("eps values must be strictly descending");
  }

  DivergenceScan out;
  out.eps = eps_list;
  const std::size_t n = eps_list.size();
  Eigen::VectorXd y(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s0 = conductivity(setup.with_epsilon(eps_list[k]), 0.0).sigma.real();
    out.sigma0.push_back(s0);
    y(k) = eps_list[k] * s0;
  }
  const double scale = std::max(y.cwiseAbs().maxCoeff(), 1e-300);
  for (std::size_t k = 1; k < n; ++k) {
    if (y(k) > y(k - 1) + 1e-12 * scale) {
      std::ostringstream msg;
      msg << "eps sigma(0) increases as eps decreases (" << y(k - 1) << " -> " << y(k) << ")";
      throw FitFailure(msg.str());
    }
  }

  const int cols = n >= 3 ? 3 : 2;
  Eigen::MatrixXd design(n, cols);
  for (std::size_t k = 0; k < n; ++k) {
    double p = 1.0;
    for (int c = 0; c < cols; ++c) {
      design(k, c) = p;
      p *= eps_list[k];
    }
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y);
  out.slope = coef(0);
  out.finite_part = coef(1);
  out.linear_part = cols == 3 ? coef(2) : 0.0;
  out.max_residual = (design * coef - y).cwiseAbs().maxCoeff();
  return out;
}

double linear_response_average(const ResponseSetup& setup, const ForceProtocol& protocol,
                               double t, const SeriesOptions& opt) {
  if (std::abs(protocol.epsilon - setup.epsilon()) > 1e-12 * setup.epsilon())
    throw DomainViolation("protocol and response setup use different eps");
  const SeriesTerm eta = eta1_from_rate(setup.h(), setup.j(), setup.beta(), protocol, t,
                                        setup.units(), opt);
  const Operator dressed = apply_delta(setup.beta() * setup.h(), eta.value);
  return -setup.average(dressed * setup.j()).real();
}

}  // namespace qa
