#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qanalysis/dissipative.hpp"
#include "qanalysis/nonequilibrium.hpp"
#include "qanalysis/verify/instances.hpp"
#include "qanalysis/verify/oracles.hpp"

using namespace qa;
using namespace qa::verify;

namespace {

DissipativeModel random_model(Rng& rng, int d) {
  DissipativeModel m;
  m.h = with_norm(random_hermitian(d, rng), uniform(rng, 0.5, 2.0));
  m.lambda = with_norm(random_operator(d, rng), uniform(rng, 0.1, 0.5));
  return m;
}

// rho(t) = e^{tK} rho0 e^{tK^dag} for constant H and Lambda.
Operator master_closed_form(const DissipativeModel& m, const Operator& rho0, double t) {
  const Operator v = expm(t * m.generator());
  return v * rho0 * v.adjoint();
}

DissipativeModel two_level() {
  DissipativeModel m;
  m.h = pauli_z();
  m.lambda = -0.1 * 0.5 * (identity(2) + pauli_z());
  return m;
}

}  // namespace

TEST_CASE("ordered_exp examples") {
  Rng rng(1);
  const Operator a = random_operator(3, rng);
  const OperatorSource constant = [&](double) { return a; };
  for (Ordering dir : {Ordering::plus, Ordering::minus}) {
    CHECK((ordered_exp(constant, 0.3, 1.5, dir) - expm(1.2 * a)).norm() < 1e-10);
  }

  // Two non-commuting segments of length 0.5 on [0, 1].
  const Operator a1 = random_operator(3, rng);
  const Operator a2 = random_operator(3, rng);
  const OperatorSource piecewise = [&](double s) { return s < 0.5 ? a1 : a2; };
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const Operator plus = ordered_exp(piecewise, 0.0, 1.0, Ordering::plus, grid);
  const Operator minus = ordered_exp(piecewise, 0.0, 1.0, Ordering::minus, grid);
  CHECK((plus - expm(0.5 * a2) * expm(0.5 * a1)).norm() < 1e-10);
  CHECK((minus - expm(0.5 * a1) * expm(0.5 * a2)).norm() < 1e-10);
  CHECK((plus - minus).norm() > 1e-3);

  // Unitarity for Hermitian families.
  const Operator h0 = random_hermitian(4, rng);
  const Operator h1 = random_hermitian(4, rng);
  const OperatorSource herm = [&](double s) -> Operator {
    return (h0 + std::sin(3.0 * s) * h1) / kI;
  };
  for (Ordering dir : {Ordering::plus, Ordering::minus}) {
    const Operator u = ordered_exp(herm, 0.0, 2.0, dir);
    CHECK((u.adjoint() * u - identity(4)).norm() < 1e-8);
  }

  // exp_+(int A) exp_-(int -A) = 1.
  const Operator b0 = random_operator(3, rng);
  const Operator b1 = random_operator(3, rng);
  const OperatorSource gen = [&](double s) -> Operator { return b0 + s * s * b1; };
  const OperatorSource neg = [&](double s) -> Operator { return -gen(s); };
  const auto g = uniform_grid(0.0, 1.0, 0.1);
  CHECK((ordered_exp(gen, 0.0, 1.0, Ordering::plus, g) *
             ordered_exp(neg, 0.0, 1.0, Ordering::minus, g) -
         identity(3))
            .norm() < 1e-10);

  // Against a fine RK4 solution of dU/dt = A(t) U.
  Operator u = identity(3);
  const OperatorRhs rhs = [&](double s, const Operator& y) -> Operator { return gen(s) * y; };
  for (int k = 0; k < 2000; ++k) u = rk4_step(rhs, k * 5e-4, u, 5e-4);
  CHECK((ordered_exp(gen, 0.0, 1.0, Ordering::plus) - u).norm() < 1e-9);

  CHECK_THROWS_AS(ordered_exp(gen, 0.0, 1.0, Ordering::plus, {0.0, 2.0}), DomainViolation);
  OrderedExpOptions strict;
  strict.max_refinements = 1;
  strict.tol = 1e-30;
  CHECK_THROWS_AS(ordered_exp_refined(gen, g, Ordering::plus, strict), StepFailure);
}

TEST_CASE("master_evolve examples") {
  Rng rng(2);
  const auto grid = uniform_grid(0.0, 2.0, 0.25);

  // Lambda = 0 is von Neumann evolution.
  DissipativeModel closed;
  closed.h = random_hermitian(3, rng);
  closed.lambda = Operator::Zero(3, 3);
  const Operator rho0 = random_density(3, rng);
  const Trajectory a = master_evolve(closed, rho0, grid);
  const EvolutionResult b = von_neumann_evolve([&](double) { return closed.h; }, rho0, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK((a.states[k] - b.states[k]).norm() < 1e-8);

  // Scalar decay.
  DissipativeModel decay;
  decay.h = Operator::Zero(3, 3);
  decay.lambda = -0.35 * identity(3);
  const Trajectory c = master_evolve(decay, rho0, grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK((c.states[k] - std::exp(-0.7 * grid[k]) * rho0).norm() < 1e-10);

  // 2-level: monotone trace decay, Hermiticity kept, closed form.
  const DissipativeModel m = two_level();
  const Operator r0 = 0.5 * (identity(2) + 0.3 * pauli_x() + 0.5 * pauli_z());
  const Trajectory tr = master_evolve(m, r0, uniform_grid(0.0, 5.0, 0.1));
  for (std::size_t k = 1; k < tr.grid.size(); ++k) {
    CHECK(tr.states[k].trace().real() < tr.states[k - 1].trace().real());
    CHECK(hermiticity_defect(tr.states[k]) < 1e-12);
    CHECK((tr.states[k] - master_closed_form(m, r0, tr.grid[k])).norm() < 1e-9);
  }
}

TEST_CASE("structured_solution") {
  Rng rng(3);
  const Operator rho0 = random_density(3, rng);

  // Lambda = 0: unitary conjugation, L = 0.
  DissipativeModel closed;
  closed.h = random_hermitian(3, rng);
  closed.lambda = Operator::Zero(3, 3);
  const StructuredSolution s0 = structured_solution(closed, rho0, 1.2);
  const Operator u = expm(-kI * 1.2 * closed.h);
  CHECK((s0.rho - u * rho0 * u.adjoint()).norm() < 1e-10);
  CHECK(s0.factors.l_t.norm() == 0.0);
  CHECK((s0.factors.rho_t0 - u * rho0 * u.adjoint()).norm() < 1e-10);

  // H = 0: e^{Lambda t} rho0 e^{Lambda^dag t}.
  DissipativeModel still;
  still.h = Operator::Zero(3, 3);
  still.lambda = with_norm(random_operator(3, rng), 0.4);
  const StructuredSolution s1 = structured_solution(still, rho0, 1.5);
  const Operator v = expm(1.5 * still.lambda);
  CHECK((s1.rho - v * rho0 * v.adjoint()).norm() < 1e-8);
  CHECK((s1.factors.lambda_t - still.lambda).norm() < 1e-14);

  // 2-level against master_evolve.
  const DissipativeModel m = two_level();
  const Operator r0 = 0.5 * (identity(2) + 0.3 * pauli_x() + 0.5 * pauli_z());
  const StructuredSolution s2 = structured_solution(m, r0, 1.0);
  const Trajectory tr = master_evolve(m, r0, {0.0, 1.0});
  CHECK((s2.rho - tr.states.back()).norm() < 1e-6);

  // Factor identities on random models.
  for (int seed = 0; seed < 10; ++seed) {
    Rng r(50 + seed);
    const int d = seed % 2 ? 4 : 2;
    const DissipativeModel model = random_model(r, d);
    const Operator rho = random_density(d, r);
    const double t = uniform(r, 0.5, 2.0);
    const StructuredSolution s = structured_solution(model, rho, t);
    const Factorization& f = s.factors;
    CHECK((s.rho - master_evolve(model, rho, {0.0, t}).states.back()).norm() < 1e-6);
    CHECK((s.rho - master_closed_form(model, rho, t)).norm() < 1e-8);
    CHECK((f.p_t * f.q_t - identity(d)).norm() < 1e-10);
    // rho(t) = e^{-itH} f(t) e^{itH} and f = P g Q.
    const Operator ut = expm(-kI * t * model.h);
    CHECK((ut * f.f_t * ut.adjoint() - s.rho).norm() < 1e-8);
    // rho(t, 0) = e^{-eta(t, 0)}
    CHECK((expm(-f.eta_t0) - f.rho_t0).norm() < 1e-10);
    CHECK(f.l_st.size() == f.grid.size());
    CHECK((f.l_st.back() - f.w_t * f.l_t * f.w_t.inverse()).norm() < 1e-10);
  }

  Operator singular = Operator::Zero(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(structured_solution(m, singular, 1.0), LogFailure);
}

TEST_CASE("inverse_dexp") {
  Rng rng(4);
  // Inverts the derivative of the exponential: d e^{Phi}[X] with X = kernel(Y)
  // equals Y e^{Phi}.
  for (int seed = 0; seed < 10; ++seed) {
    Rng r(seed);
    const Operator phi = 0.7 * random_operator(3, r);
    const Operator y = random_operator(3, r);
    const Operator x = inverse_dexp(phi, y);
    const double h = 1e-5;
    const Operator dexp = (expm(phi + h * x) - expm(phi - h * x)) / (2.0 * h);
    CHECK((dexp - y * expm(phi)).norm() < 1e-7);
  }

  // Commuting argument: identity kernel.
  const Operator d = random_hermitian(3, rng);
  CHECK((inverse_dexp(d, d * d) - d * d).norm() < 1e-12);

  // Defective Phi goes through the block exponential.
  Operator jordan = Operator::Zero(3, 3);
  jordan(0, 1) = 1.0;
  jordan(1, 2) = 1.0;
  const Operator y = random_operator(3, rng);
  const Operator x = inverse_dexp(jordan, y);
  const double h = 1e-5;
  const Operator dexp = (expm(jordan + h * x) - expm(jordan - h * x)) / (2.0 * h);
  CHECK((dexp - y * expm(jordan)).norm() < 1e-8);

  Operator resonant = Operator::Zero(2, 2);
  resonant(1, 1) = cplx(0.0, 2.0 * std::numbers::pi);
  CHECK_THROWS_AS(inverse_dexp(resonant, y.topLeftCorner(2, 2)), KernelSingularity);
}

TEST_CASE("entropy_operator") {
  Rng rng(5);
  const Operator rho0 = random_density(3, rng);

  // Lambda = 0.
  DissipativeModel closed;
  closed.h = random_hermitian(3, rng);
  closed.lambda = Operator::Zero(3, 3);
  const EntropyOperatorResult e0 = entropy_operator(closed, rho0, 1.0);
  const Operator u = expm(-kI * closed.h);
  CHECK((expm(e0.phi) - u * rho0 * u.adjoint()).norm() < 1e-10);
  CHECK((e0.phi - e0.phi0).norm() < 1e-12);

  // Commuting path: H = 0 and Lambda a real multiple of a function of rho0.
  DissipativeModel comm;
  comm.h = Operator::Zero(3, 3);
  comm.lambda = -0.2 * rho0;
  const EntropyOperatorResult e1 = entropy_operator(comm, rho0, 1.0);
  const Operator direct = logm(expm(comm.lambda) * rho0 * expm(comm.lambda.adjoint()));
  CHECK((e1.phi - direct).norm() < 1e-9);
  CHECK((e1.phi - (e1.phi0 + 2.0 * comm.lambda)).norm() < 1e-9);

  // 2-level dissipative instance at t = 1.
  const DissipativeModel m = two_level();
  const Operator r0 = 0.5 * (identity(2) + 0.3 * pauli_x() + 0.5 * pauli_z());
  const EntropyOperatorResult e2 = entropy_operator(m, r0, 1.0);
  const Operator master = master_evolve(m, r0, {0.0, 1.0}).states.back();
  CHECK((expm(e2.phi) - master).norm() < 1e-6);
  CHECK((e2.eta + logm(master)).norm() < 1e-6);

  for (int seed = 0; seed < 10; ++seed) {
    Rng r(90 + seed);
    const int d = seed % 2 ? 4 : 2;
    const DissipativeModel model = random_model(r, d);
    const Operator rho = random_density(d, r);
    const EntropyOperatorResult e = entropy_operator(model, rho, 1.0);
    const Operator ref = master_evolve(model, rho, {0.0, 1.0}).states.back();
    CHECK((expm(e.phi) - ref).norm() < 1e-6);
    CHECK((e.phi - logm(ref)).norm() < 1e-6);
  }
}

TEST_CASE("functional_derivative_check") {
  const auto grid = uniform_grid(0.0, 1.0, 0.01);
  const OperatorSource chain = [](double s) -> Operator { return pauli_z() + s * pauli_x(); };

  CHECK(functional_derivative_check(chain, Operator::Zero(2, 2), 1.0, 0.5, grid).residual == 0.0);

  const OperatorSource commuting = [](double s) -> Operator {
    return (1.0 + std::cos(s)) * pauli_z();
  };
  const FunctionalDerivativeCheck c =
      functional_derivative_check(commuting, 0.3 * pauli_z(), 1.0, 0.4, grid);
  CHECK(c.residual <= 1e-8);

  const FunctionalDerivativeCheck r = functional_derivative_check(chain, pauli_y(), 1.0, 0.5, grid);
  CHECK(r.closed_form.norm() > 0.5);
  CHECK(r.residual <= 1e-4);

  // End points use a one-sided bump.
  for (double t1 : {0.0, 1.0}) {
    CHECK(functional_derivative_check(chain, pauli_y(), 1.0, t1, grid).residual <= 1e-2);
  }
  CHECK_THROWS_AS(functional_derivative_check(chain, pauli_y(), 1.0, 1.5, grid), DomainViolation);
}
