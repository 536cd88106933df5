#pragma once

#include <cstddef>
#include <random>

#include "qhist/contexts.hpp"
#include "qhist/linalg.hpp"

namespace qhist {

using Rng = std::mt19937_64;

/// Entries with independent standard normal real and imaginary parts.
CMatrix ginibre(std::size_t dim, Rng& rng);
/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
CMatrix random_unitary(std::size_t dim, Rng& rng);
/// (G + G†)/2 scaled so entries are O(1).
CMatrix random_hermitian(std::size_t dim, Rng& rng);
/// Uniformly distributed unit vector.
CVector random_unit_vector(std::size_t dim, Rng& rng);
State random_pure_state(std::size_t dim, Rng& rng);
/// Full-rank Wishart-type density matrix G G† / Tr(G G†).
State random_mixed_state(std::size_t dim, Rng& rng);

}  // namespace qhist
