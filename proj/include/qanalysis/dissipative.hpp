#pragma once

// Ordered exponentials and the unnormalized master equation
//   d rho/dt = (1 / i hbar) [H, rho] + Lambda rho + rho Lambda^dag,
// its factorized solution and the logarithm Phi(t) = log rho(t) obtained by
// integrating dPhi/dx = (delta_Phi / (e^{delta_Phi} - 1)) L(x, t).

#include <vector>

#include "qanalysis/propagation.hpp"

namespace qa {

struct DissipativeModel {
  Operator h;       // Hermitian
  Operator lambda;  // any bounded operator
  Units units;

  void validate() const;
  // K = H / (i hbar) + Lambda, so that d rho/dt = K rho + rho K^dag.
  Operator generator() const;
  // Lambda_s = e^{isH/hbar} Lambda e^{-isH/hbar}
  Operator lambda_at(double s) const;
};

struct OrderedExpOptions {
  double tol = 1e-10;        // on |U_{h/2} - U_h| / 15, relative to max(1, ||U||)
  int max_refinements = 8;
};

struct OrderedExpResult {
  Operator value;
  double error_estimate = 0.0;
  int refinements = 0;
};

// exp_+ int A (latest time leftmost) or exp_- int A (latest time rightmost)
// over [grid.front(), grid.back()], one fourth-order Magnus factor per
// interval. Intervals are halved until the estimate meets tol; StepFailure
// otherwise. Grid end points are kept, so piecewise-constant integrands with
// breaks on the grid are integrated exactly.
OrderedExpResult ordered_exp_refined(const OperatorSource& a, const std::vector<double>& grid,
                                     Ordering direction, const OrderedExpOptions& opt = {});
// Same on [t0, t1]; an empty grid means steps of at most 0.05.
Operator ordered_exp(const OperatorSource& a, double t0, double t1, Ordering direction,
                     std::vector<double> grid = {}, const OrderedExpOptions& opt = {});
// One fixed pass over the grid, no refinement.
Operator ordered_exp_on_grid(const OperatorSource& a, const std::vector<double>& grid,
                             Ordering direction);

// RK4 with step halving on the given grid.
Trajectory master_evolve(const DissipativeModel& model, const Operator& rho0,
                         const std::vector<double>& grid, const StepControl& ctl = {});

struct Factorization {
  double t = 0.0;
  std::vector<double> grid;        // integration grid on [0, t]
  Operator p_t;                    // exp_+(-int_0^t Lambda^dag_s ds)
  Operator q_t;                    // exp_-(int_0^t Lambda^dag_s ds) = p_t^{-1}
  Operator f_t;                    // e^{itH/hbar} rho(t) e^{-itH/hbar}
  Operator g_t;                    // exp_+(int_0^t L(s) ds) rho(0)
  Operator lambda_t;               // Lambda_t
  Operator l_t;                    // L(t) = Q (Lambda_t + Lambda_t^dag) P
  std::vector<Operator> l_st;      // L(s, t) at the grid points
  Operator w_t;                    // e^{-itH/hbar} P(t)
  Operator rho_t0;                 // W rho(0) W^{-1}
  Operator eta_t0;                 // -log rho(t, 0) = W (-log rho(0)) W^{-1}
  double error_estimate = 0.0;
};

struct StructuredOptions {
  double step = 0.02;
  double tol = 1e-10;
  int max_refinements = 6;
};

struct StructuredSolution {
  Operator rho;  // exp_+(int L(s, t) ds) rho(t, 0)
  Factorization factors;
};

// Builds the factorization on [0, t] and assembles rho(t). LogFailure when
// rho(0) has an eigenvalue that is not positive real.
StructuredSolution structured_solution(const DissipativeModel& model, const Operator& rho0,
                                       double t, const StructuredOptions& opt = {});

struct EntropyOperatorResult {
  Operator phi;       // Phi(t), with e^{Phi(t)} = rho(t)
  Operator eta;       // -Phi(t)
  Operator phi0;      // -eta(t, 0)
  double error_estimate = 0.0;
  int steps = 0;
};

// Integrates the Phi ODE from Phi(0) = -eta(t, 0) to x = t by RK4 with step
// halving. LogFailure, KernelSingularity or StepFailure.
EntropyOperatorResult entropy_operator(const DissipativeModel& model, const Operator& rho0,
                                       double t, const StructuredOptions& opt = {});

// (delta_Phi / (e^{delta_Phi} - 1)) Y. Uses the eigenvectors of Phi, or the
// d^2 x d^2 block exponential when they are ill-conditioned. KernelSingularity
// when an eigenvalue difference of Phi sits within 1e-12 of 2 pi i k, k != 0.
Operator inverse_dexp(const Operator& phi, const Operator& y);

struct FunctionalDerivativeOptions {
  double width = 1e-3;   // bump width around t1
  double kappa = 1e-5;   // central-difference amplitude
  int bump_steps = 8;    // grid intervals inside the bump
  Units units;
};

struct FunctionalDerivativeCheck {
  Operator closed_form;        // exp_+(int_t1^t) (dH / i hbar) exp_+(int_0^t1)
  Operator finite_difference;  // d/dk exp_+(int (H + k b dH) / i hbar), bump b of unit area
  double residual = 0.0;       // ||closed_form - finite_difference||
};

// Variation of exp_+((1 / i hbar) int_0^t H(s) ds) under dH applied at t1.
FunctionalDerivativeCheck functional_derivative_check(const OperatorSource& h_of_t,
                                                      const Operator& dh, double t, double t1,
                                                      const std::vector<double>& grid,
                                                      const FunctionalDerivativeOptions& opt = {});

}  // namespace qa
