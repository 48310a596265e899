#pragma once

// Random and canonical operator instances for tests and the acceptance suite.

#include <random>

#include "qanalysis/operator_core.hpp"

namespace qa::verify {

using Rng = std::mt19937_64;

Operator pauli_x();
Operator pauli_y();
Operator pauli_z();

Operator random_operator(int dim, Rng& rng, double scale = 1.0);
Operator random_hermitian(int dim, Rng& rng, double scale = 1.0);
Operator random_unitary(int dim, Rng& rng);
// Hermitian with eigenvalues drawn uniformly from [lo, hi].
Operator random_positive(int dim, Rng& rng, double lo, double hi);
// Trace-one density matrix with eigenvalues >= min_eig.
Operator random_density(int dim, Rng& rng, double min_eig = 0.05);
// Rescales so that the spectral norm equals `norm`.
Operator with_norm(const Operator& o, double norm);

double uniform(Rng& rng, double lo, double hi);

}  // namespace qa::verify
