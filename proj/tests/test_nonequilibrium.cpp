#include <doctest.h>

#include <cmath>
#include <iostream>

#include "qanalysis/models.hpp"
#include "qanalysis/nonequilibrium.hpp"
#include "qanalysis/quadrature.hpp"
#include "qanalysis/verify/instances.hpp"
#include "qanalysis/verify/oracles.hpp"

using namespace qa;
using namespace qa::verify;

namespace {

Model two_spin_xx() { return build_model(ModelSpec{}); }

ZubarevSetup reference_setup(double amplitude) {
  const Model m = two_spin_xx();
  ZubarevSetup s;
  s.h = m.h;
  s.a = m.observable("sz_0");
  s.beta = 1.0;
  s.protocol.amplitude = amplitude;
  s.protocol.waveform = ForceProtocol::Waveform::cosine;
  s.protocol.omega = 1.0;
  s.protocol.epsilon = 0.05;
  s.protocol.t_start = -400.0;
  return s;
}

// Closed form of eta_1 for the cosine force, entry by entry in the eigenbasis:
// -beta Adot_mn int_T^0 e^{eps v} cos(w (t+v)) e^{i v W_mn} dv.
Operator eta1_closed_form(const ZubarevSetup& s, double t) {
  const Spectrum sp = spectral_decompose(s.h);
  const Operator adot = sp.to_eigenbasis(s.a_dot());
  const double lower = s.protocol.t_start - t;
  const double w = s.protocol.omega;
  const double eps = s.protocol.epsilon;
  Operator out = Operator::Zero(sp.dim(), sp.dim());
  for (int m = 0; m < sp.dim(); ++m) {
    for (int n = 0; n < sp.dim(); ++n) {
      const double wmn = sp.eigenvalues(m) - sp.eigenvalues(n);
      cplx integral = 0.0;
      for (double sign : {1.0, -1.0}) {
        const cplx z = eps + kI * (wmn + sign * w);
        integral += 0.5 * std::exp(kI * (sign * w * t)) * (1.0 - std::exp(z * lower)) / z;
      }
      out(m, n) = -s.beta * s.protocol.amplitude * adot(m, n) * integral;
    }
  }
  return sp.from_eigenbasis(out);
}

}  // namespace

TEST_CASE("von_neumann_evolve with a constant Hamiltonian") {
  Rng rng(3);
  const Operator h = random_hermitian(4, rng);
  const Operator rho0 = random_density(4, rng);
  const auto grid = uniform_grid(0.0, 3.0, 0.5);
  const EvolutionResult evo = von_neumann_evolve([&](double) { return h; }, rho0, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Operator u = expm(-kI * grid[k] * h);
    CHECK((evo.states[k] - u * rho0 * u.adjoint()).norm() < 1e-8);
  }

  // Stationary state.
  const Operator rho_eq = expm(-h) / expm(-h).trace();
  const EvolutionResult still = von_neumann_evolve([&](double) { return h; }, rho_eq, grid);
  for (const auto& r : still.states) CHECK((r - rho_eq).norm() < 1e-12);
}

TEST_CASE("two-level rotation matches the closed-form Bloch vector") {
  const Operator rho0 = 0.5 * (identity(2) + pauli_x());
  const auto grid = uniform_grid(0.0, 5.0, 0.25);
  const EvolutionResult evo = von_neumann_evolve([](double) { return pauli_z(); }, rho0, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const Operator want =
        0.5 * (identity(2) + std::cos(2.0 * t) * pauli_x() + std::sin(2.0 * t) * pauli_y());
    CHECK((evo.states[k] - want).norm() < 1e-8);
    CHECK(std::abs((evo.states[k] * evo.states[k]).trace() - 1.0) < 1e-8);
  }
}

TEST_CASE("von_neumann_evolve with a driven Hamiltonian agrees with a fine RK4 reference") {
  const OperatorSource h = [](double t) -> Operator {
    return pauli_z() + 0.7 * std::cos(1.3 * t) * pauli_x();
  };
  const Operator rho0 = 0.5 * (identity(2) + 0.4 * pauli_x() - 0.3 * pauli_z());
  const auto grid = uniform_grid(0.0, 4.0, 1.0);
  const EvolutionResult evo = von_neumann_evolve(h, rho0, grid);
  Operator rho = rho0;
  const double dt = 1e-3;
  const OperatorRhs rhs = [&](double t, const Operator& r) -> Operator {
    return -kI * commutator(h(t), r);
  };
  for (int k = 0; k < 4000; ++k) rho = rk4_step(rhs, k * dt, rho, dt);
  CHECK((evo.states.back() - rho).norm() < 1e-8);
  CHECK(spectrum_drift(evo) < 1e-12);
}

TEST_CASE("formula 3 residuals and unitary invariants") {
  const OperatorSource h = [](double t) -> Operator {
    return pauli_z() + 0.5 * std::sin(t) * pauli_x();
  };
  const auto grid = uniform_grid(0.0, 2.0, 1e-3);

  const Operator pure = 0.5 * (identity(2) + pauli_x());
  const EvolutionResult evo = von_neumann_evolve(h, pure, grid);
  const auto ident = ScalarFunction::custom("identity", [](int n, double x) -> cplx {
    return n == 0 ? x : (n == 1 ? 1.0 : 0.0);
  });
  const auto square = ScalarFunction::custom("square", [](int n, double x) -> cplx {
    return n == 0 ? x * x : (n == 1 ? 2.0 * x : (n == 2 ? 2.0 : 0.0));
  });
  CHECK(verify_formula3(ident, evo, h) <= 1e-6);
  CHECK(verify_formula3(square, evo, h) <= 1e-5);
  CHECK(trace_drift(square, evo) <= 1e-7);

  const Operator mixed = 0.5 * (identity(2) + 0.6 * pauli_x() + 0.2 * pauli_y());
  const EvolutionResult evo2 = von_neumann_evolve(h, mixed, grid);
  const auto neg_log = ScalarFunction::custom(
      "-log", [](int n, double x) -> cplx {
        return n == 0 ? -std::log(x) : -ScalarFunction::log().derivative(n, x);
      },
      0.0);
  CHECK(verify_formula3(neg_log, evo2, h) <= 1e-5);
  // von Neumann entropy tr(rho eta) and the spectrum stay put.
  const auto entropy = ScalarFunction::custom(
      "-x log x", [](int n, double x) -> cplx {
        if (n == 0) return -x * std::log(x);
        if (n == 1) return -std::log(x) - 1.0;
        return -ScalarFunction::log().derivative(n - 1, x);
      },
      0.0);
  CHECK(trace_drift(entropy, evo2) <= 1e-7);
  CHECK(spectrum_drift(evo2) <= 1e-7);
  CHECK_THROWS_AS(verify_formula3(neg_log, evo, h), DomainViolation);
}

TEST_CASE("force protocol validation") {
  ForceProtocol p;
  p.epsilon = 0.05;
  p.t_start = -100.0;
  CHECK_THROWS_AS(p.validate(), DomainViolation);
  p.t_start = -400.0;
  CHECK_NOTHROW(p.validate());
  p.epsilon = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainViolation);
}

TEST_CASE("eta1 trivial cases") {
  ZubarevSetup s = reference_setup(0.01);
  s.a = two_spin_xx().observable("sz_total");  // commutes with the XX chain
  CHECK(eta1(s, 0.0).value.norm() == 0.0);
  ZubarevSetup zero = reference_setup(0.0);
  CHECK(eta1(zero, 0.0).value.norm() == 0.0);
}

TEST_CASE("eta1 against its closed form and the linearized ODE") {
  const ZubarevSetup s = reference_setup(0.01);
  const double t = 2.0;
  const SeriesTerm e1 = eta1(s, t);
  const Operator exact = eta1_closed_form(s, t);
  CHECK(is_hermitian(e1.value, 1e-9));
  CHECK((e1.value - exact).norm() <= 1e-9 * exact.norm() + 1e-12);
  CHECK(e1.error_estimate < 1e-8);

  // d eta1/dtau = (1/i hbar)[H, eta1] - beta F~(tau) Adot, integrated directly.
  const Operator adot = s.a_dot();
  const OperatorRhs rhs = [&](double tau, const Operator& y) -> Operator {
    return -kI * commutator(s.h, y) - s.beta * s.protocol.effective(tau, t) * adot;
  };
  StepControl ctl;
  ctl.tol = 1e-12;
  const Trajectory tr = integrate_rk4(rhs, zeros(4), {s.protocol.t_start, t}, ctl);
  CHECK((tr.states.back() - e1.value).norm() <= 1e-6);
}

TEST_CASE("eta2 against the explicit double integral") {
  // Short adiabatic window so the 2-D quadrature is cheap.
  ZubarevSetup s = reference_setup(0.3);
  s.protocol.epsilon = 1.0;
  s.protocol.t_start = -20.0;
  const double t = 0.5;
  const Spectrum sp = spectral_decompose(s.h);
  auto heis = [&](const Operator& x, double v) {
    const Operator u = sp.eigenvectors *
                       (kI * v * sp.eigenvalues).array().exp().matrix().asDiagonal() *
                       sp.eigenvectors.adjoint();
    return Operator(u * x * u.adjoint());
  };
  // -(beta / i hbar) int_T^0 ds e^{eps s} F(t+s) int_0^s ds' e^{eps s'} F(t+s') [A(s'), Adot(s)]
  const double lower = s.protocol.t_start - t;
  const QuadratureRule outer = composite_gauss_legendre(80, 12, lower, 0.0);
  Operator want = Operator::Zero(4, 4);
  for (std::size_t i = 0; i < outer.nodes.size(); ++i) {
    const double v = outer.nodes[i];
    const Operator adot_v = heis(s.a_dot(), v);
    const QuadratureRule inner = composite_gauss_legendre(std::max(1, static_cast<int>(-v * 4)) , 12, v, 0.0);
    Operator acc = Operator::Zero(4, 4);
    for (std::size_t j = 0; j < inner.nodes.size(); ++j) {
      const double w = inner.nodes[j];
      acc += inner.weights[j] * s.protocol.effective(t + w, t) * commutator(heis(s.a, w), adot_v);
    }
    // int_0^s = -int_s^0
    want += outer.weights[i] * s.protocol.effective(t + v, t) * (-acc);
  }
  want *= -s.beta / kI;
  const SeriesTerm e2 = eta_n(s, t, 2);
  CHECK(is_hermitian(e2.value, 1e-9));
  CHECK((e2.value - want).norm() <= 1e-7 * want.norm());
}

TEST_CASE("eta_n trivial cases and bilinearity") {
  ZubarevSetup s = reference_setup(0.01);
  ZubarevSetup commuting = s;
  commuting.a = two_spin_xx().observable("sz_total");
  for (int n = 1; n <= 3; ++n) CHECK(eta_n(commuting, 0.0, n).value.norm() == 0.0);

  ZubarevSetup doubled = s;
  doubled.protocol.amplitude = 0.02;
  const Operator e2 = eta_n(s, 0.0, 2).value;
  const Operator e2d = eta_n(doubled, 0.0, 2).value;
  CHECK((e2d - 4.0 * e2).norm() <= 1e-9 * e2d.norm());
  CHECK(is_hermitian(e2, 1e-9));

  SeriesOptions tight;
  tight.max_evaluations = 1000;
  CHECK_THROWS_AS(eta_n(s, 0.0, 2, tight), QuadratureBudgetExceeded);
  CHECK_THROWS_AS(eta_n(s, 0.0, 7), QuadratureBudgetExceeded);
}

TEST_CASE("eta_prime_ode trivial cases") {
  ZubarevSetup s = reference_setup(0.0);
  const auto grid = uniform_grid(s.protocol.t_start, 0.0, 100.0);
  for (const auto& y : eta_prime_ode(s, grid).states) CHECK(y.norm() == 0.0);
  ZubarevSetup commuting = reference_setup(0.01);
  commuting.a = two_spin_xx().observable("sz_total");
  for (const auto& y : eta_prime_ode(commuting, grid).states) CHECK(y.norm() < 1e-14);
  CHECK_THROWS_AS(eta_prime_ode(reference_setup(0.01), uniform_grid(-300.0, 0.0, 1.0)),
                  DomainViolation);
}

TEST_CASE("entropy operator from the ODE reproduces the driven density") {
  const ZubarevSetup s = reference_setup(0.05);
  const double t = 1.0;
  const std::vector<double> grid{s.protocol.t_start, t};
  const Operator eta_prime = eta_prime_ode(s, grid).states.back();
  const EntropyExpansion ex{0.0, s.beta, {hermitian_part(eta_prime)}};
  const Operator rho_series = zubarev_density(ex, s.h);
  const Operator rho_exact = driven_equilibrium_evolve(s, grid).states.back();
  CHECK((rho_series - rho_exact).norm() <= 1e-5);
}

TEST_CASE("eta' minus the truncated series scales as F^{N+1}") {
  const double t = 1.0;
  std::vector<double> r1, r2, r3;
  for (double f : {1e-2, 5e-3}) {
    const ZubarevSetup s = reference_setup(f);
    StepControl ctl;
    ctl.tol = 1e-13;
    const Operator ode = eta_prime_ode(s, {s.protocol.t_start, t}, ctl).states.back();
    SeriesOptions opt;
    opt.tol = 1e-12;
    const auto terms = entropy_series(s, t, 3, opt);
    r1.push_back((ode - terms[0].value).norm());
    r2.push_back((ode - terms[0].value - terms[1].value).norm());
    r3.push_back((ode - terms[0].value - terms[1].value - terms[2].value).norm());
  }
  MESSAGE("ratios ", r1[0] / r1[1], " ", r2[0] / r2[1], " ", r3[0] / r3[1]);
  CHECK(r1[0] / r1[1] == doctest::Approx(4.0).epsilon(0.25));
  CHECK(r2[0] / r2[1] == doctest::Approx(8.0).epsilon(0.25));
  CHECK(r3[0] / r3[1] == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("zubarev_density") {
  const Model m = two_spin_xx();
  const Operator canonical = expm(-m.h) / expm(-m.h).trace();
  CHECK((zubarev_density({0.0, 1.0, {}}, m.h) - canonical).norm() < 1e-13);
  CHECK(std::abs(zubarev_density({0.0, 1.0, {}}, m.h).trace() - 1.0) < 1e-12);

  // A term proportional to H acts like a change of beta and keeps the eigenvectors.
  const Operator shifted = zubarev_density({0.0, 1.0, {0.5 * m.h}}, m.h);
  const Operator want = expm(-1.5 * m.h) / expm(-1.5 * m.h).trace();
  CHECK((shifted - want).norm() < 1e-13);
  CHECK_THROWS_AS(zubarev_density({0.0, 1.0, {kI * m.h}}, m.h), DomainViolation);
}

TEST_CASE("first-order Zubarev density approximates the driven state to O(F^2)") {
  const double t = 1.0;
  std::vector<double> dist;
  for (double f : {2e-2, 1e-2}) {
    const ZubarevSetup s = reference_setup(f);
    const Operator rho1 = zubarev_density(entropy_expansion(s, t, 1), s.h);
    const Operator exact = driven_equilibrium_evolve(s, {s.protocol.t_start, t}).states.back();
    const Eigen::VectorXd ev = spectral_decompose(hermitian_part(rho1 - exact)).eigenvalues;
    dist.push_back(0.5 * ev.cwiseAbs().sum());
  }
  CHECK(dist[0] / dist[1] == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("eta1 sensitivity to the adiabatic rate") {
  ZubarevSetup s = reference_setup(0.01);
  const Operator a = eta1(s, 0.0).value;
  s.protocol.epsilon = 0.025;
  s.protocol.t_start = -800.0;
  const Operator b = eta1(s, 0.0).value;
  const double change = (a - b).norm() / a.norm();
  MESSAGE("relative change of eta1 when eps is halved: ", change);
  CHECK(std::isfinite(change));
}
