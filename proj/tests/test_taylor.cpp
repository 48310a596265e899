#include <doctest.h>

#include <cmath>

#include "qanalysis/models.hpp"
#include "qanalysis/taylor.hpp"
#include "qanalysis/verify/instances.hpp"
#include "qanalysis/verify/oracles.hpp"

using namespace qa;
using namespace qa::verify;

namespace {

Operator diag2(double a, double b) {
  Operator o = Operator::Zero(2, 2);
  o(0, 0) = a;
  o(1, 1) = b;
  return o;
}

double rel_err(const Operator& got, const Operator& want) {
  return (got - want).norm() / std::max(1e-300, want.norm());
}

Operator nth_derivative(const ScalarFunction& f, const Operator& a, const Operator& b, int n) {
  return higher_derivative_apply({f, a, b, n});
}

Model two_spin_xx() {
  ModelSpec spec;
  spec.sites = 2;
  return build_model(spec);
}

const ScalarFunction kFunctions[] = {ScalarFunction::exp_neg(), ScalarFunction::inverse(),
                                     ScalarFunction::log()};

}  // namespace

TEST_CASE("divided differences") {
  const auto lg = ScalarFunction::log();
  const double two[] = {1.0, 2.0};
  CHECK(std::abs(divided_difference(lg, two, 1e-7) - std::log(2.0)) < 1e-15);

  const double triple[] = {1.5, 1.5, 1.5};
  CHECK(std::abs(divided_difference(lg, triple, 1e-7) - lg.derivative(2, 1.5) / 2.0) < 1e-15);

  // Order-3 divided difference of a cubic is its leading coefficient.
  const auto cubic = ScalarFunction::custom("cubic", [](int n, double x) -> cplx {
    if (n == 0) return x * x * x;
    if (n == 1) return 3.0 * x * x;
    if (n == 2) return 6.0 * x;
    return n == 3 ? 6.0 : 0.0;
  });
  const double nodes[] = {0.3, -1.0, 2.0, 0.7};
  CHECK(std::abs(divided_difference(cubic, nodes, 1e-7) - 1.0) < 1e-13);
  const double mixed[] = {0.3, 0.3, 2.0, 2.0};
  CHECK(std::abs(divided_difference(cubic, mixed, 1e-7) - 1.0) < 1e-13);

  // h_k(z) is the divided difference of y^{n+k}.
  const double z[] = {0.2, -0.4, 1.1};
  const auto y5 = ScalarFunction::custom("y^5", [](int n, double x) -> cplx {
    double c = 1.0;
    for (int k = 0; k < n; ++k) c *= (5 - k);
    return n > 5 ? 0.0 : c * std::pow(x, 5 - n);
  });
  CHECK(complete_homogeneous(z, 3) == doctest::Approx(divided_difference(y5, z, 1e-9).real()));
  CHECK(complete_homogeneous(z, 0) == 1.0);
}

TEST_CASE("order one agrees with the first-derivative kernel") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Operator a = random_positive(4, rng, 0.5, 5.0);
    const Operator b = random_operator(4, rng);
    for (const auto& f : kFunctions) {
      CHECK((nth_derivative(f, a, b, 1) - quantum_derivative_apply(f, a, b)).norm() <=
            1e-12 * std::max(1.0, b.norm()));
    }
  }
}

TEST_CASE("commuting directions reduce to scalar derivatives") {
  const Operator a = diag2(1.0, 2.0);
  const Operator b = diag2(0.5, -1.5);
  for (int n = 1; n <= 4; ++n) {
    for (const auto& f : kFunctions) {
      Operator bn = Operator::Identity(2, 2);
      for (int k = 0; k < n; ++k) bn *= b;
      const Operator want = function_of(f, a, n) * bn;
      CHECK((nth_derivative(f, a, b, n) - want).norm() <= 1e-13 * std::max(1.0, want.norm()));
    }
  }
}

TEST_CASE("second derivative on diag(1,2), sigma_x matches the second central difference") {
  const Operator a = diag2(1.0, 2.0);
  const Operator b = pauli_x();
  const auto f = ScalarFunction::exp_neg();
  const Operator d2 = nth_derivative(f, a, b, 2);
  CHECK((d2 - second_central_difference(f, a, b, 1e-4)).norm() < 1e-6);
  // O(h^2): the error drops ~100x from h = 1e-2 to h = 1e-3.
  const double e2 = (d2 - second_central_difference(f, a, b, 1e-2)).norm();
  const double e3 = (d2 - second_central_difference(f, a, b, 1e-3)).norm();
  CHECK(e2 / e3 == doctest::Approx(100.0).epsilon(0.05));
}

TEST_CASE("second derivative chain sum agrees with the simplex integral") {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const Operator a = random_positive(4, rng, 0.5, 5.0);
    const Operator b = random_hermitian(4, rng);
    for (const auto& f : kFunctions) {
      const Operator chain = nth_derivative(f, a, b, 2);
      const Operator simplex = simplex2_by_quadrature(f, a, b, 40);
      CHECK((chain - simplex).norm() <= 1e-6 * std::max(1.0, simplex.norm()));
    }
  }
}

TEST_CASE("higher derivatives are covariant under unitary conjugation") {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Operator a = random_positive(3, rng, 0.5, 3.0);
    const Operator b = random_operator(3, rng);
    const Operator u = random_unitary(3, rng);
    for (int n = 1; n <= 3; ++n) {
      for (const auto& f : kFunctions) {
        const Operator lhs = nth_derivative(f, u * a * u.adjoint(), u * b * u.adjoint(), n);
        const Operator rhs = u * nth_derivative(f, a, b, n) * u.adjoint();
        CHECK((lhs - rhs).norm() <= 1e-9 * std::max(1.0, rhs.norm()));
      }
    }
  }
}

TEST_CASE("higher_derivative_apply guards") {
  const Operator a = diag2(1.0, 2.0);
  CHECK_THROWS_AS(nth_derivative(ScalarFunction::log(), diag2(-1.0, 1.0), pauli_x(), 2),
                  DomainViolation);
  CHECK_THROWS_AS(nth_derivative(ScalarFunction::log(), a, pauli_x(), 0), DomainViolation);
  CHECK_THROWS_AS(nth_derivative(ScalarFunction::log(), a, pauli_x(), 7), DimensionCap);
  HigherDerivativeRequest raised{ScalarFunction::exp_neg(), a, pauli_x(), 8, 8};
  CHECK(higher_derivative_apply(raised).allFinite());
}

TEST_CASE("taylor_sum examples") {
  const Operator a = diag2(1.0, 2.0);
  const Operator b = pauli_x();
  const auto f = ScalarFunction::exp_neg();
  CHECK((taylor_sum(f, a, b, 0.0, 6) - function_of(f, a)).norm() == 0.0);

  const double x = 0.1;
  const Operator first = function_of(f, a) + x * d_exp_neg(a, b);
  CHECK((taylor_sum(f, a, b, x, 1) - first).norm() < 1e-14);
  const Operator exact = expm(-(a + x * b));
  CHECK((taylor_sum(f, a, b, x, 1) - exact).norm() < 0.5 * x * x);
  CHECK((taylor_sum(f, a, b, x, 6) - exact).norm() <= 1e-8);

  CHECK_THROWS_AS(taylor_sum(ScalarFunction::log(), a, b, 5.0, 2), DomainViolation);
}

TEST_CASE("taylor remainder scales as x^{N+1}") {
  const Model m = two_spin_xx();
  const Operator a = m.h + 2.0 * identity(4);
  const Operator b = m.observable("sx_0");
  for (const auto& f : kFunctions) {
    for (int n : {2, 4, 6}) {
      const double x0 = 0.2;
      const double e0 = (taylor_sum(f, a, b, x0, n) - function_of(f, a + x0 * b)).norm();
      const double e1 = (taylor_sum(f, a, b, x0 / 2, n) - function_of(f, a + x0 / 2 * b)).norm();
      CHECK(e0 / e1 == doctest::Approx(std::pow(2.0, n + 1)).epsilon(0.3));
    }
  }
}

TEST_CASE("nonlinear_response_density") {
  const Model m = two_spin_xx();
  const double beta = 1.0;
  const Operator exact0 = expm(-beta * m.h);
  CHECK((nonlinear_response_density(m.h, m.observable("total_sz"), beta, 0.0, 3).sum() - exact0)
            .norm() < 1e-13);

  // Commuting case: term n = (beta h)^n / n! Q^n e^{-beta H}.
  const Operator q = m.observable("total_sz");
  CHECK(commutator(m.h, q).norm() < 1e-14);
  const double h_ext = 0.05;
  const ResponseExpansion ex = nonlinear_response_density(m.h, q, beta, h_ext, 3);
  Operator qn = identity(4);
  double coeff = 1.0;
  for (int n = 0; n <= 3; ++n) {
    CHECK((ex.terms[n] - coeff * qn * exact0).norm() < 1e-13);
    qn *= q;
    coeff *= beta * h_ext / (n + 1);
  }

  const double r1 = (ex.sum() - expm(-beta * (m.h - h_ext * q))).norm();
  const double r2 =
      (nonlinear_response_density(m.h, q, beta, h_ext / 2, 3).sum() - expm(-beta * (m.h - h_ext / 2 * q)))
          .norm();
  CHECK(r1 <= 1e-6);
  CHECK(r1 / r2 == doctest::Approx(16.0).epsilon(0.3));

  // Non-commuting perturbation.
  const Operator sx = m.observable("sx_0");
  const double r3 = (nonlinear_response_density(m.h, sx, beta, h_ext, 3).sum() -
                     expm(-beta * (m.h - h_ext * sx)))
                        .norm();
  const double r4 = (nonlinear_response_density(m.h, sx, beta, h_ext / 2, 3).sum() -
                     expm(-beta * (m.h - h_ext / 2 * sx)))
                        .norm();
  CHECK(r3 / r4 == doctest::Approx(16.0).epsilon(0.3));
  CHECK_THROWS_AS(nonlinear_response_density(m.h, sx, 0.0, h_ext, 3), DomainViolation);
}

TEST_CASE("formula_A_d2") {
  const auto f = ScalarFunction::exp_neg();
  const Operator a = diag2(1.0, 2.0);
  const Operator c = diag2(0.3, -1.1);
  CHECK((formula_A_d2(f, a, c, 0) - function_of(f, a, 2) * c * c).norm() < 1e-15);
  CHECK((formula_A_d2(f, a, pauli_x(), 0) - function_of(f, a, 2)).norm() < 1e-15);
  CHECK((formula_A_d2(f, a, pauli_x(), 30) - nth_derivative(f, a, pauli_x(), 2)).norm() < 1e-8);

  // Operator recursion and eigenbasis Taylor coefficients agree term by term.
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const Operator pa = random_positive(3, rng, 0.5, 1.5);
    const Operator b = random_operator(3, rng);
    const auto ops = formula_A_d2_terms(f, pa, b, 12);
    const auto eig = formula_A_terms(f, pa, b, 2, 12);
    for (int m = 0; m <= 12; ++m) {
      CHECK((ops[m] - eig[m]).norm() <= 1e-12 * std::max(1.0, eig[m].norm()));
    }
  }
}

TEST_CASE("third-order Formula A against its explicit quotient form") {
  // B supported on the cycle 0 -> 1 -> 2 -> 3 -> 0 keeps the three nodes of
  // every chain distinct, so the quotients are finite.
  Rng rng(23);
  const auto f = ScalarFunction::exp_neg();
  const Operator a = random_positive(4, rng, 0.5, 2.0);
  const Spectrum s = spectral_decompose(a);
  Operator bt = Operator::Zero(4, 4);
  for (int i = 0; i < 4; ++i) bt(i, (i + 1) % 4) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
  const Operator b = s.from_eigenbasis(bt);
  const int m_max = 25;
  const auto terms = formula_A_terms(f, a, b, 3, m_max);
  Operator total = Operator::Zero(4, 4);
  for (int m = 0; m <= m_max; ++m) {
    Operator want = Operator::Zero(4, 4);
    for (int i0 = 0; i0 < 4; ++i0) {
      const int i1 = (i0 + 1) % 4, i2 = (i0 + 2) % 4, i3 = (i0 + 3) % 4;
      const double l0 = s.eigenvalues(i0);
      const double p1 = l0 - s.eigenvalues(i1);  // d1
      const double p2 = l0 - s.eigenvalues(i2);  // d1 + d2
      const double p3 = l0 - s.eigenvalues(i3);  // d1 + d2 + d3
      const int p = m + 2;
      const double brace = std::pow(p1, p) / ((p2 - p1) * (p3 - p1)) -
                           std::pow(p2, p) / ((p2 - p1) * (p3 - p2)) +
                           std::pow(p3, p) / ((p3 - p1) * (p3 - p2));
      const double coeff = 6.0 * ((m % 2) ? -1.0 : 1.0) / std::tgamma(m + 4.0);
      want(i0, i3) = coeff * f.derivative(m + 3, l0) * brace * bt(i0, i1) * bt(i1, i2) * bt(i2, i3);
    }
    want = s.from_eigenbasis(want);
    CHECK((terms[m] - want).norm() <= 1e-9 * std::max(1e-3, want.norm()));
    total += terms[m];
  }
  CHECK(rel_err(total, nth_derivative(f, a, b, 3)) < 1e-10);
}

TEST_CASE("alpha_n_estimate") {
  const auto f = ScalarFunction::exp_neg();
  const Operator a = diag2(1.0, 2.0);
  for (double t : alpha_n_estimate(f, a, diag2(0.4, 2.0), 2, 10).terms) CHECK(t == 0.0);

  // n = 1 reproduces the factorial-weighted first-order diagnostic.
  const RootSequence one = alpha_n_estimate(f, a, pauli_x(), 1, 20);
  const RootSequence series = series_alpha(f, a, pauli_x(), 20);
  for (std::size_t k = 0; k < one.terms.size(); ++k) {
    CHECK(one.terms[k] == doctest::Approx(series.terms[k]).epsilon(1e-12));
  }
  CHECK(one.predicts_convergence());
  CHECK(series.predicts_convergence());

  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator pa = with_norm(random_positive(4, rng, 0.05, 1.0), 1.0);
    const Operator b = with_norm(random_hermitian(4, rng), 1.0);
    for (int n = 1; n <= 3; ++n) {
      for (double t : alpha_n_estimate(f, pa, b, n, 20).terms) CHECK(t < 1.0);
    }
  }
}
