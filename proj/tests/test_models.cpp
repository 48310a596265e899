#include <doctest.h>

#include <cmath>

#include "qanalysis/models.hpp"
#include "qanalysis/verify/instances.hpp"

using namespace qa;
using namespace qa::verify;

TEST_CASE("single spin is h sigma_z") {
  ModelSpec spec;
  spec.sites = 1;
  spec.field = 1.0;
  const Model m = build_model(spec);
  CHECK(m.h.rows() == 2);
  CHECK((m.h - pauli_z()).norm() == 0.0);
  spec.field = 0.3;
  CHECK((build_model(spec).h - 0.3 * pauli_z()).norm() < 1e-15);
}

TEST_CASE("two-site XX chain") {
  const Model m = build_model(ModelSpec{});
  CHECK(m.h.rows() == 4);
  CHECK(is_hermitian(m.h));
  const Eigen::VectorXd e = spectral_decompose(m.h).eigenvalues;
  CHECK(e(0) == doctest::Approx(-1.0));
  CHECK(std::abs(e(1)) < 1e-14);
  CHECK(std::abs(e(2)) < 1e-14);
  CHECK(e(3) == doctest::Approx(1.0));
  CHECK(commutator(m.h, m.observable("sz_total")).norm() < 1e-14);
  CHECK((m.observable("total_sz") - 0.5 * m.observable("sz_total")).norm() == 0.0);
  CHECK((m.observable("current") - m.observable("current_0")).norm() == 0.0);
  CHECK(is_hermitian(m.observable("current")));
}

TEST_CASE("XXZ chains conserve the total sigma_z") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    ModelSpec spec;
    spec.kind = ModelSpec::Kind::xxz_chain;
    spec.sites = 2 + trial % 4;
    spec.jxy = uniform(rng, -2.0, 2.0);
    spec.jz = uniform(rng, -2.0, 2.0);
    spec.field = uniform(rng, -1.0, 1.0);
    const Model m = build_model(spec);
    CHECK(m.h.rows() == (1 << spec.sites));
    CHECK(is_hermitian(m.h));
    CHECK(commutator(m.h, m.observable("sz_total")).norm() <= 1e-12);
    // Local fields are not conserved once the chain couples spins.
    CHECK(commutator(m.h, m.observable("sx_0")).norm() > 1e-3);
  }
}

TEST_CASE("embedding and guards") {
  const Operator z0 = embed(pauli_z(), 0, 2);
  CHECK(z0(0, 0) == 1.0);
  CHECK(z0(2, 2) == -1.0);
  ModelSpec big;
  big.sites = 9;
  CHECK_THROWS_AS(build_model(big), DimensionCap);
  big.max_sites = 9;
  big.sites = 3;
  CHECK_NOTHROW(build_model(big));
  ModelSpec none;
  none.sites = 0;
  CHECK_THROWS_AS(build_model(none), ConfigError);
  CHECK_THROWS_AS(build_model(ModelSpec{}).observable("nope"), ConfigError);
  ModelSpec custom;
  custom.kind = ModelSpec::Kind::custom;
  custom.custom_h = pauli_x();
  custom.sites = 1;
  CHECK((build_model(custom).h - pauli_x()).norm() == 0.0);
  CHECK(model_kind_name(model_kind_from_name("xxz_chain")) == "xxz_chain");
}
