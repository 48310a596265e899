#include "qanalysis/nonequilibrium.hpp"

#include <cmath>
#include <sstream>

namespace qa {

void ForceProtocol::validate() const {
  if (!(epsilon > 0.0)) throw DomainViolation("adiabatic rate epsilon must be positive");
  if (std::exp(epsilon * t_start) > 1e-8) {
    std::ostringstream msg;
    msg << "t_start = " << t_start << " too late for epsilon = " << epsilon
        << ": need exp(eps t_start) <= 1e-8";
    throw DomainViolation(msg.str());
  }
}

double ForceProtocol::force(double t) const {
  return waveform == Waveform::step ? amplitude : amplitude * std::cos(omega * t);
}

double ForceProtocol::effective(double t, double t_obs) const {
  return std::exp(epsilon * (t - t_obs)) * force(t);
}

double ForceProtocol::cutoff_tail(double t_obs) const {
  return std::abs(amplitude) * std::exp(epsilon * (t_start - t_obs)) / epsilon;
}

EvolutionResult von_neumann_evolve(const OperatorSource& h_of_t, const Operator& rho0,
                                   const std::vector<double>& grid, const EvolveOptions& opt) {
  check_hermitian(rho0, "initial density");
  if (grid.size() < 2) throw DomainViolation("von_neumann_evolve needs at least two grid points");
  const double hbar = opt.units.hbar;
  const OperatorSource gen = [&](double t) -> Operator { return (-kI / hbar) * h_of_t(t); };

  auto pass = [&](double max_step) {
    std::vector<Operator> out{rho0};
    Operator rho = rho0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double span = grid[k] - grid[k - 1];
      const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / max_step - 1e-9)));
      const double h = span / n;
      for (int j = 0; j < n; ++j) {
        const Operator u = magnus4_step(gen, grid[k - 1] + j * h, h);
        rho = u * rho * u.adjoint();
      }
      out.push_back(rho);
    }
    return out;
  };

  double h = opt.control.max_step;
  std::vector<Operator> coarse = pass(h);
  for (int level = 0; level < opt.control.max_refinements; ++level) {
    h *= 0.5;
    std::vector<Operator> fine = pass(h);
    double err = 0.0;
    for (std::size_t k = 0; k < fine.size(); ++k) {
      err = std::max(err, (fine[k] - coarse[k]).norm() / 15.0);
    }
    if (err <= opt.control.tol) {
      return {grid, std::move(fine), h, 4, err};
    }
    coarse = std::move(fine);
  }
  std::ostringstream msg;
  msg << "von Neumann step halving did not reach tol " << opt.control.tol << " at step " << h;
  throw StepFailure(msg.str());
}

double verify_formula3(const ScalarFunction& f, const EvolutionResult& evo,
                       const OperatorSource& h_of_t, const Units& units) {
  const std::size_t n = evo.states.size();
  if (n < 3) throw DomainViolation("verify_formula3 needs at least three samples");
  std::vector<Operator> fr;
  fr.reserve(n);
  for (const auto& rho : evo.states) fr.push_back(function_of(f, hermitian_part(rho)));
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double h1 = evo.grid[k] - evo.grid[k - 1];
    const double h2 = evo.grid[k + 1] - evo.grid[k];
    // Three-point derivative on a possibly uneven grid.
    const Operator deriv = (-h2 / (h1 * (h1 + h2))) * fr[k - 1] +
                           ((h2 - h1) / (h1 * h2)) * fr[k] + (h1 / (h2 * (h1 + h2))) * fr[k + 1];
    const Operator residual = kI * units.hbar * deriv - commutator(h_of_t(evo.grid[k]), fr[k]);
    worst = std::max(worst, operator_norm(residual));
  }
  return worst;
}

double trace_drift(const ScalarFunction& f, const EvolutionResult& evo) {
  const cplx ref = function_of(f, hermitian_part(evo.states.front())).trace();
  double worst = 0.0;
  for (const auto& rho : evo.states) {
    worst = std::max(worst, std::abs(function_of(f, hermitian_part(rho)).trace() - ref));
  }
  return worst;
}

double spectrum_drift(const EvolutionResult& evo) {
  const Eigen::VectorXd ref = spectral_decompose(hermitian_part(evo.states.front())).eigenvalues;
  double worst = 0.0;
  for (const auto& rho : evo.states) {
    const Eigen::VectorXd ev = spectral_decompose(hermitian_part(rho)).eigenvalues;
    worst = std::max(worst, (ev - ref).cwiseAbs().maxCoeff());
  }
  return worst;
}

Operator ZubarevSetup::a_dot() const { return (1.0 / (kI * units.hbar)) * commutator(a, h); }

void ZubarevSetup::validate() const {
  check_hermitian(h, "Hamiltonian");
  check_hermitian(a, "force operator A");
  if (a.rows() != h.rows()) throw DimensionMismatch("A and H dimensions differ");
  if (!(beta > 0.0)) throw DomainViolation("beta must be positive");
  protocol.validate();
}

namespace {

// Eigenbasis data shared by the series and the ODE.
struct Frame {
  Spectrum s;
  Operator a;      // A in the eigenbasis of H
  Operator adot;   // Adot in the eigenbasis of H
  Eigen::MatrixXd freq;  // (E_m - E_n) / hbar

  Frame(const Operator& h, const Operator& a_op, const Operator& adot_op, double hbar)
      : s(spectral_decompose(h)) {
    a = s.to_eigenbasis(a_op);
    adot = s.to_eigenbasis(adot_op);
    const int d = s.dim();
    freq.resize(d, d);
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) freq(m, n) = (s.eigenvalues(m) - s.eigenvalues(n)) / hbar;
  }
  explicit Frame(const ZubarevSetup& setup)
      : Frame(setup.h, setup.a, setup.a_dot(), setup.units.hbar) {}

  // X(v) = e^{ivH/hbar} X e^{-ivH/hbar} in the eigenbasis.
  Operator heisenberg(const Operator& x, double v) const {
    Operator out(x.rows(), x.cols());
    for (Eigen::Index n = 0; n < x.cols(); ++n)
      for (Eigen::Index m = 0; m < x.rows(); ++m)
        out(m, n) = x(m, n) * std::exp(kI * (v * freq(m, n)));
    return out;
  }
};

// X_1..X_n at u = 0 by cumulative trapezoid on `intervals` panels over [T, 0].
std::vector<Operator> nested_sweep(const Frame& fr, const ForceProtocol& p, double t,
                                   double lower, long intervals, int n_max) {
  const int d = fr.s.dim();
  const double h = -lower / static_cast<double>(intervals);
  std::vector<Operator> x(n_max, Operator::Zero(d, d));
  std::vector<Operator> g_prev(n_max, Operator::Zero(d, d));
  // At the lower end every X_k vanishes, so only the source term is nonzero.
  g_prev[0] = p.effective(t + lower, t) * fr.heisenberg(fr.adot, lower);
  std::vector<Operator> g_next(n_max, Operator::Zero(d, d));
  for (long j = 1; j <= intervals; ++j) {
    const double v = (j == intervals) ? 0.0 : lower + static_cast<double>(j) * h;
    // g_k at v needs X_{k-1}(v), so levels advance in order.
    const double force = p.effective(t + v, t);
    g_next[0] = force * fr.heisenberg(fr.adot, v);
    x[0] += 0.5 * h * (g_prev[0] + g_next[0]);
    if (n_max > 1) {
      const Operator av = fr.heisenberg(fr.a, v);
      for (int k = 1; k < n_max; ++k) {
        g_next[k] = force * commutator(av, x[k - 1]);
        x[k] += 0.5 * h * (g_prev[k] + g_next[k]);
      }
    }
    std::swap(g_prev, g_next);
  }
  return x;
}

}  // namespace

namespace {

std::vector<SeriesTerm> series_on_frame(const Frame& fr, double beta, const ForceProtocol& protocol,
                                        double a_norm, double adot_norm, double hbar, double t,
                                        int n_max, const SeriesOptions& opt) {
  if (n_max < 1) throw DomainViolation("entropy series order must be >= 1");
  if (n_max > opt.max_order) {
    std::ostringstream msg;
    msg << "entropy series order " << n_max << " exceeds the cap " << opt.max_order;
    throw QuadratureBudgetExceeded(msg.str());
  }
  const double lower = protocol.t_start - t;
  if (!(lower < 0.0)) throw DomainViolation("observation time must follow t_start");

  double step = opt.step;
  if (!(step > 0.0)) {
    double w = fr.freq.cwiseAbs().maxCoeff() + protocol.epsilon;
    if (protocol.waveform == ForceProtocol::Waveform::cosine) w += std::abs(protocol.omega);
    step = std::min(0.1, 0.25 / std::max(w, 1e-12));
  }
  long intervals = std::max(2L, static_cast<long>(std::ceil(-lower / step)));

  long spent = 0;
  auto sweep = [&](long m) {
    spent += (m + 1) * n_max;
    if (spent > opt.max_evaluations) {
      std::ostringstream msg;
      msg << "entropy series quadrature exceeded " << opt.max_evaluations << " evaluations (order "
          << n_max << ", " << m << " panels)";
      throw QuadratureBudgetExceeded(msg.str());
    }
    return nested_sweep(fr, protocol, t, lower, m, n_max);
  };

  // Trapezoid at h and h/2, Richardson to O(h^4), repeat until two successive
  // extrapolations agree.
  std::vector<Operator> prev = sweep(intervals);
  std::vector<Operator> rich_prev;
  std::vector<Operator> rich;
  double change = std::numeric_limits<double>::infinity();
  for (;;) {
    intervals *= 2;
    std::vector<Operator> cur = sweep(intervals);
    rich.clear();
    for (int k = 0; k < n_max; ++k) rich.push_back((4.0 * cur[k] - prev[k]) / 3.0);
    if (!rich_prev.empty()) {
      change = 0.0;
      double scale = 0.0;
      for (int k = 0; k < n_max; ++k) {
        change = std::max(change, (rich[k] - rich_prev[k]).norm());
        scale = std::max(scale, rich[k].norm());
      }
      if (change <= opt.tol * std::max(scale, 1e-300) || scale == 0.0) break;
    }
    rich_prev = rich;
    prev = std::move(cur);
  }

  // eta_k = -beta (-1 / i hbar)^{k-1} X_k(0)
  const cplx inner = -1.0 / (kI * hbar);
  const double tail = beta * adot_norm * protocol.cutoff_tail(t);
  std::vector<SeriesTerm> out;
  cplx factor = -beta;
  double tail_k = tail;
  for (int k = 0; k < n_max; ++k) {
    SeriesTerm term;
    term.value = fr.s.from_eigenbasis(factor * rich[k]);
    term.error_estimate = std::abs(factor) * change + tail_k;
    out.push_back(std::move(term));
    factor *= inner;
    tail_k *= 2.0 * a_norm * std::abs(protocol.amplitude) / (hbar * protocol.epsilon);
  }
  return out;
}

}  // namespace

std::vector<SeriesTerm> entropy_series(const ZubarevSetup& setup, double t, int n_max,
                                       const SeriesOptions& opt) {
  setup.validate();
  const Frame fr(setup);
  return series_on_frame(fr, setup.beta, setup.protocol, operator_norm(setup.a),
                         operator_norm(setup.a_dot()), setup.units.hbar, t, n_max, opt);
}

SeriesTerm eta1_from_rate(const Operator& h, const Operator& adot, double beta,
                          const ForceProtocol& protocol, double t, const Units& units,
                          const SeriesOptions& opt) {
  check_hermitian(h, "Hamiltonian");
  check_hermitian(adot, "rate operator");
  if (adot.rows() != h.rows()) throw DimensionMismatch("rate operator and H dimensions differ");
  if (!(beta > 0.0)) throw DomainViolation("beta must be positive");
  protocol.validate();
  const Frame fr(h, Operator::Zero(h.rows(), h.cols()), adot, units.hbar);
  return series_on_frame(fr, beta, protocol, 0.0, operator_norm(adot), units.hbar, t, 1, opt)
      .front();
}

SeriesTerm eta1(const ZubarevSetup& setup, double t, const SeriesOptions& opt) {
  return entropy_series(setup, t, 1, opt).front();
}

SeriesTerm eta_n(const ZubarevSetup& setup, double t, int n, const SeriesOptions& opt) {
  if (n < 1) throw DomainViolation("eta_n needs n >= 1");
  return entropy_series(setup, t, n, opt).back();
}

EvolutionResult eta_prime_ode(const ZubarevSetup& setup, const std::vector<double>& grid,
                              const StepControl& ctl) {
  setup.validate();
  if (grid.size() < 2) throw DomainViolation("eta_prime_ode needs at least two grid points");
  if (std::abs(grid.front() - setup.protocol.t_start) > 1e-12 * std::max(1.0, std::abs(grid.front()))) {
    throw DomainViolation("eta_prime_ode grid must start at t_start");
  }
  const Frame fr(setup);
  const double t_obs = grid.back();
  const cplx inner = -1.0 / (kI * setup.units.hbar);
  const ForceProtocol& p = setup.protocol;
  // Interaction picture Y = e^{i tau H} eta' e^{-i tau H}:
  //   dY/dtau = -(1 / i hbar) F~ [A_I, Y] - beta F~ Adot_I
  const OperatorRhs rhs = [&](double tau, const Operator& y) -> Operator {
    const double force = p.effective(tau, t_obs);
    if (force == 0.0) return Operator::Zero(y.rows(), y.cols());
    return force * (inner * commutator(fr.heisenberg(fr.a, tau), y) -
                    setup.beta * fr.heisenberg(fr.adot, tau));
  };
  const int d = fr.s.dim();
  const Trajectory tr = integrate_rk4(rhs, Operator::Zero(d, d), grid, ctl);
  EvolutionResult out{grid, {}, tr.step, 4, tr.error_estimate};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.states.push_back(fr.s.from_eigenbasis(fr.heisenberg(tr.states[k], -grid[k])));
  }
  return out;
}

EntropyExpansion entropy_expansion(const ZubarevSetup& setup, double t, int n_max,
                                   const SeriesOptions& opt) {
  EntropyExpansion ex;
  ex.beta = setup.beta;
  const Spectrum s = spectral_decompose(setup.h);
  const double e0 = s.min();
  double z = 0.0;
  for (int i = 0; i < s.dim(); ++i) z += std::exp(-setup.beta * (s.eigenvalues(i) - e0));
  ex.phi = std::log(z) - setup.beta * e0;
  if (n_max > 0) {
    for (auto& term : entropy_series(setup, t, n_max, opt)) ex.terms.push_back(std::move(term.value));
  }
  return ex;
}

Operator zubarev_density(const EntropyExpansion& expansion, const Operator& h) {
  check_hermitian(h, "Hamiltonian");
  Operator exponent = expansion.beta * h;
  for (const auto& term : expansion.terms) {
    if (term.rows() != h.rows()) throw DimensionMismatch("entropy term dimension differs from H");
    if (!is_hermitian(term, 1e-8)) throw DomainViolation("entropy expansion term is not Hermitian");
    exponent += term;
  }
  const Spectrum s = spectral_decompose(hermitian_part(exponent));
  // Shift by the smallest eigenvalue before exponentiating.
  Eigen::VectorXd w = (-(s.eigenvalues.array() - s.min())).exp();
  w /= w.sum();
  return s.eigenvectors * w.cast<cplx>().asDiagonal() * s.eigenvectors.adjoint();
}

EvolutionResult driven_equilibrium_evolve(const ZubarevSetup& setup,
                                          const std::vector<double>& grid,
                                          const StepControl& ctl) {
  setup.validate();
  const double t_obs = grid.back();
  const Operator rho0 = zubarev_density(EntropyExpansion{0.0, setup.beta, {}}, setup.h);
  const OperatorSource h_of_t = [&](double tau) -> Operator {
    return setup.h - setup.protocol.effective(tau, t_obs) * setup.a;
  };
  EvolveOptions opt;
  opt.control = ctl;
  opt.units = setup.units;
  return von_neumann_evolve(h_of_t, rho0, grid, opt);
}

}  // namespace qa
