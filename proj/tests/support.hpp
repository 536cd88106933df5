#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "qhist/contexts.hpp"
#include "qhist/linalg.hpp"
#include "qhist/random.hpp"

namespace qhist::test {

inline CVector vec(std::initializer_list<Complex> xs) {
    CVector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (const auto& x : xs) v[i++] = x;
    return v;
}

inline CMatrix diag(std::initializer_list<double> xs) {
    CVector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v.asDiagonal();
}

inline CVector basis(std::size_t dim, std::size_t k) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    v[static_cast<Eigen::Index>(k)] = 1.0;
    return v;
}

/// Random partition of 0..dim-1 into between 1 and dim non-empty blocks.
inline std::vector<std::vector<Eigen::Index>> random_blocks(std::size_t dim, Rng& rng) {
    std::vector<Eigen::Index> cols(dim);
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(cols.begin(), cols.end(), rng);
    const std::size_t parts = std::uniform_int_distribution<std::size_t>(1, dim)(rng);
    std::vector<std::vector<Eigen::Index>> blocks(parts);
    for (std::size_t i = 0; i < parts; ++i) blocks[i].push_back(cols[i]);
    for (std::size_t i = parts; i < dim; ++i)
        blocks[std::uniform_int_distribution<std::size_t>(0, parts - 1)(rng)].push_back(cols[i]);
    return blocks;
}

/// Atoms spanned by groups of columns of `basis`.
inline std::vector<Projector> atoms_in_basis(const CMatrix& basis_cols,
                                             const std::vector<std::vector<Eigen::Index>>& blocks) {
    std::vector<Projector> atoms;
    for (const auto& block : blocks) {
        std::vector<CVector> vs;
        for (auto c : block) vs.push_back(basis_cols.col(c));
        atoms.push_back(projector_from_vectors(vs));
    }
    return atoms;
}

inline Context random_context(std::size_t dim, Rng& rng) {
    return validate_context(atoms_in_basis(random_unitary(dim, rng), random_blocks(dim, rng)));
}

/// Context diagonal in the columns of `u`, with a random coarse-graining.
inline Context context_in_basis(const CMatrix& u, Rng& rng) {
    return validate_context(
        atoms_in_basis(u, random_blocks(static_cast<std::size_t>(u.rows()), rng)));
}

inline std::size_t random_dim(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline IndexSet random_subset(std::size_t universe, Rng& rng) {
    IndexSet s(universe);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < universe; ++i)
        if (coin(rng)) s.insert(i);
    return s;
}

}  // namespace qhist::test
