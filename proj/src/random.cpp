#include "qhist/random.hpp"

#include <cmath>

namespace qhist {

CMatrix ginibre(std::size_t dim, Rng& rng) {
    std::normal_distribution<double> normal;
    const auto d = static_cast<Eigen::Index>(dim);
    CMatrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            g(i, j) = Complex(normal(rng), normal(rng));
        }
    }
    return g;
}

CMatrix random_unitary(std::size_t dim, Rng& rng) {
    const CMatrix g = ginibre(dim, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const Complex diag = r(j, j);
        const double mag = std::abs(diag);
        if (mag > 0.0) {
            q.col(j) *= diag / mag;
        }
    }
    return q;
}

CMatrix random_hermitian(std::size_t dim, Rng& rng) {
    const CMatrix g = ginibre(dim, rng);
    return 0.5 * (g + g.adjoint());
}

CVector random_unit_vector(std::size_t dim, Rng& rng) {
    std::normal_distribution<double> normal;
    CVector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = Complex(normal(rng), normal(rng));
    }
    return v / v.norm();
}

State random_pure_state(std::size_t dim, Rng& rng) {
    return State::from_pure(random_unit_vector(dim, rng));
}

State random_mixed_state(std::size_t dim, Rng& rng) {
    const CMatrix g = ginibre(dim, rng);
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = (0.5 * (rho + rho.adjoint())).eval();
    return State::from_density(std::move(rho));
}

}  // namespace qhist
