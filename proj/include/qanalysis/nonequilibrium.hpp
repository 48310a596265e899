#pragma once

// Von Neumann evolution, invariance of f(rho(t)) along it, and the
// renormalized perturbation series of the entropy operator
//   eta(t) = Phi + beta H + eta'(t),  eta' = sum_n eta_n
// for H(t) = H - A F(t).

#include <vector>

#include "qanalysis/propagation.hpp"

namespace qa {

// F(t) = amplitude (step) or amplitude cos(omega t) (cosine), switched on
// adiabatically from t_start. Every force insertion observed at time t_obs
// carries exp(eps (tau - t_obs)).
struct ForceProtocol {
  enum class Waveform { step, cosine };
  double amplitude = 0.0;
  Waveform waveform = Waveform::cosine;
  double omega = 1.0;
  double epsilon = 0.05;
  double t_start = -400.0;  // stands in for -infinity

  // Throws DomainViolation unless eps > 0 and exp(eps t_start) <= 1e-8.
  void validate() const;
  double force(double t) const;
  // exp(eps (t - t_obs)) F(t)
  double effective(double t, double t_obs) const;
  // Weight of the truncated interval (-inf, t_start) seen from t_obs.
  double cutoff_tail(double t_obs) const;
};

struct EvolutionResult {
  std::vector<double> grid;
  std::vector<Operator> states;
  double step = 0.0;
  int order = 4;
  double error_estimate = 0.0;
};

struct EvolveOptions {
  StepControl control;
  Units units;
};

// i hbar d rho/dt = [H(t), rho] by fourth-order Magnus steps with step halving.
// The accepted states are the finer solution (exactly unitary); StepFailure
// when the estimate misses tol.
EvolutionResult von_neumann_evolve(const OperatorSource& h_of_t, const Operator& rho0,
                                   const std::vector<double>& grid, const EvolveOptions& opt = {});

// max over interior grid points of ||i hbar (central difference of f(rho)) - [H(t), f(rho)]||
double verify_formula3(const ScalarFunction& f, const EvolutionResult& evo,
                       const OperatorSource& h_of_t, const Units& units = {});
// max_t |tr f(rho(t)) - tr f(rho(t_0))|
double trace_drift(const ScalarFunction& f, const EvolutionResult& evo);
// max_t max_k |lambda_k(rho(t)) - lambda_k(rho(t_0))|
double spectrum_drift(const EvolutionResult& evo);

struct ZubarevSetup {
  Operator h;      // time-independent part, Hermitian
  Operator a;      // operator conjugate to the force, Hermitian
  double beta = 1.0;
  ForceProtocol protocol;
  Units units;

  // (1 / i hbar) [A, H]
  Operator a_dot() const;
  void validate() const;
};

struct SeriesOptions {
  double step = 0.0;         // initial trapezoid step; 0 picks one from the spectrum
  double tol = 1e-10;        // relative, on successive Richardson values
  long max_evaluations = 50'000'000;  // grid points x order, summed over refinements
  int max_order = 6;
};

struct SeriesTerm {
  Operator value;
  double error_estimate = 0.0;  // Richardson change plus cutoff tail
};

// eta_1(t) = -beta int_{-inf}^0 e^{eps s} F(t+s) Adot(s) ds
SeriesTerm eta1(const ZubarevSetup& setup, double t, const SeriesOptions& opt = {});
// eta_1..eta_N at time t from one cumulative sweep:
//   X_1(u) = int_T^u F~ Adot,   X_k(u) = int_T^u F~ [A(v), X_{k-1}(v)] dv
//   eta_k(t) = -beta (-1 / i hbar)^{k-1} X_k(0),   F~(v) = e^{eps v} F(t + v).
// The latest time sits in the outermost commutator; eta_2 is the explicit
// double integral with [A(s'), Adot(s)], s < s' < 0.
// Throws QuadratureBudgetExceeded when the cost cap is hit.
std::vector<SeriesTerm> entropy_series(const ZubarevSetup& setup, double t, int n_max,
                                       const SeriesOptions& opt = {});
SeriesTerm eta_n(const ZubarevSetup& setup, double t, int n, const SeriesOptions& opt = {});
// eta_1 from the rate operator Adot alone (it is all the first order needs).
SeriesTerm eta1_from_rate(const Operator& h, const Operator& adot, double beta,
                          const ForceProtocol& protocol, double t, const Units& units = {},
                          const SeriesOptions& opt = {});

// d eta'/dtau = (1 / i hbar) [H - A F~(tau), eta'] - beta F~(tau) Adot, eta'(t_start) = 0,
// with F~(tau) = exp(eps (tau - t_obs)) F(tau) and t_obs = grid.back().
// Integrated by RK4 in the interaction picture of H. The grid must start at t_start.
EvolutionResult eta_prime_ode(const ZubarevSetup& setup, const std::vector<double>& grid,
                              const StepControl& ctl = {});

struct EntropyExpansion {
  double phi = 0.0;  // log tr e^{-beta H}
  double beta = 1.0;
  std::vector<Operator> terms;  // eta_1..eta_N
};

EntropyExpansion entropy_expansion(const ZubarevSetup& setup, double t, int n_max,
                                   const SeriesOptions& opt = {});

// exp(-beta H - sum eta_n), normalized to unit trace.
Operator zubarev_density(const EntropyExpansion& expansion, const Operator& h);

// Full density under H(t) = H - A F~(t) from rho_eq at t_start, observed at
// grid.back(); the nonperturbative oracle for the series.
EvolutionResult driven_equilibrium_evolve(const ZubarevSetup& setup,
                                          const std::vector<double>& grid,
                                          const StepControl& ctl = {});

}  // namespace qa
