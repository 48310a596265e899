#pragma once

// Time grids and propagators for linear operator ODEs. Fourth-order Magnus
// steps are exactly unitary for anti-Hermitian generators.

#include <functional>
#include <vector>

#include "qanalysis/operator_core.hpp"

namespace qa {

using OperatorSource = std::function<Operator(double)>;

// t0, t0 + h, ..., t1 with h <= dt chosen so the end point is hit exactly.
std::vector<double> uniform_grid(double t0, double t1, double dt);

// exp(X) for a general square matrix (Pade scaling and squaring).
Operator expm_general(const Operator& x);
// exp(-i s K) for Hermitian K, spectrally; exactly unitary.
Operator unitary_exp(const Operator& k, double s);

enum class Ordering { plus, minus };

// One fourth-order Magnus step over [t, t + h].
//   plus:  dU/dt = G(t) U,  U(t + h) = exp(Omega) U(t)
//   minus: dU/dt = U G(t),  U(t + h) = U(t) exp(Omega)
// Two-point Gauss nodes. When G is anti-Hermitian the exponential is taken
// spectrally, so the step is unitary to round-off.
Operator magnus4_step(const OperatorSource& g, double t, double h, Ordering order = Ordering::plus);

// Classical RK4 step for dY/dt = rhs(t, Y).
using OperatorRhs = std::function<Operator(double, const Operator&)>;
Operator rk4_step(const OperatorRhs& rhs, double t, const Operator& y, double h);

struct StepControl {
  double max_step = 0.05;   // initial internal step
  double tol = 1e-10;       // on the step-halving error estimate
  int max_refinements = 10;
};

struct Trajectory {
  std::vector<double> grid;
  std::vector<Operator> states;
  double step = 0.0;            // internal step of the accepted solution
  int order = 4;
  double error_estimate = 0.0;  // |y_{h/2} - y_h| / 15, max over samples
};

// RK4 on every grid interval, halving the internal step until the estimate
// meets tol; returns the Richardson-extrapolated solution. Throws StepFailure.
Trajectory integrate_rk4(const OperatorRhs& rhs, const Operator& y0,
                         const std::vector<double>& grid, const StepControl& ctl);

}  // namespace qa
