#include <doctest.h>

#include <cmath>

#include "qhist/contexts.hpp"
#include "qhist/random.hpp"
#include "support.hpp"

using namespace qhist;
using qhist::test::basis;
using qhist::test::diag;
using qhist::test::vec;

namespace {

constexpr double tau = kDefaultTolerance;

Context coordinate(std::size_t d) {
    std::vector<Projector> atoms;
    for (std::size_t k = 0; k < d; ++k) atoms.push_back(ray(basis(d, k)));
    return validate_context(atoms);
}

ContextViolation::Kind violation_of(const std::vector<CMatrix>& atoms) {
    try {
        validate_context(atoms);
    } catch (const ContextError& e) {
        return e.violation().kind;
    }
    FAIL("context unexpectedly accepted");
    return ContextViolation::Kind::empty;
}

}  // namespace

TEST_CASE("State validation") {
    CHECK(State::from_pure(basis(2, 0)).dim() == 2);
    CHECK_THROWS_AS(State::from_pure(0.9 * basis(2, 0)), InputError);
    CHECK_THROWS_AS(State::from_density(diag({0.5, 0.6})), InputError);
    CHECK_THROWS_AS(State::from_density(diag({1.5, -0.5})), InputError);
    CMatrix nonherm = diag({0.5, 0.5});
    nonherm(0, 1) = 0.1;
    CHECK_THROWS_AS(State::from_density(nonherm), InputError);
    CHECK((State::maximally_mixed(4).rho().trace() - Complex(1.0)).real() == doctest::Approx(0.0));
}

TEST_CASE("validate_context examples") {
    CHECK(coordinate(3).size() == 3);
    CHECK(validate_context(std::vector{Projector::identity(3)}).size() == 1);

    const auto e1 = ray(basis(2, 0));
    const auto diag_ray = ray(vec({1, 1}));
    try {
        validate_context(std::vector{e1, diag_ray});
        FAIL("expected orthogonality failure");
    } catch (const ContextError& e) {
        CHECK(e.violation().kind == ContextViolation::Kind::orthogonality);
        CHECK(e.violation().first == 0);
        CHECK(e.violation().second == 1);
        CHECK(e.violation().residual > 0.1);
    }

    CHECK(violation_of({diag({1, 0, 0}), diag({0, 1, 0})}) == ContextViolation::Kind::completeness);
    CHECK(violation_of({diag({1, 0.5})}) == ContextViolation::Kind::not_projector);
    CHECK(violation_of({diag({1, 1}), diag({0, 0})}) == ContextViolation::Kind::zero_atom);
    CHECK(violation_of({}) == ContextViolation::Kind::empty);
    CHECK(violation_of({diag({1, 0}), diag({0, 0, 1})}) == ContextViolation::Kind::dimension);
}

TEST_CASE("property projectors and lattice operations") {
    const auto ctx = coordinate(3);
    CHECK((ctx.full().projector().matrix() - CMatrix::Identity(3, 3)).norm() <= tau);
    CHECK(ctx.empty().projector().is_zero());
    CHECK((ctx.property({0, 1}).projector().matrix() - diag({1, 1, 0})).norm() <= tau);
    CHECK_THROWS_AS(ctx.property({3}), InputError);

    const auto p = ctx.property({0});
    CHECK(complement(p) == ctx.property({1, 2}));
    CHECK((complement(p).projector().matrix() - diag({0, 1, 1})).norm() <= tau);
    CHECK(complement(complement(p)) == p);
    CHECK(complement(ctx.full()) == ctx.empty());
    CHECK(meet(p, complement(p)) == ctx.empty());
    CHECK(join(p, complement(p)) == ctx.full());

    const auto a = ctx.property({0, 1});
    const auto b = ctx.property({1, 2});
    CHECK(meet(a, b) == ctx.property({1}));
    CHECK(join(a, b) == ctx.full());
    CHECK(leq(ctx.property({1}), a));
    CHECK_FALSE(leq(a, b));

    const auto other = coordinate(3);
    CHECK_THROWS_AS(meet(p, other.property({0})), InputError);
    CHECK_THROWS_AS(leq(p, other.property({0})), InputError);
}

TEST_CASE("born_probability examples") {
    const auto ctx = coordinate(3);
    CHECK(born_probability(State::from_pure(basis(3, 0)), ctx.property({0})) == doctest::Approx(1.0));
    Rng rng(3);
    CHECK(born_probability(random_mixed_state(3, rng), ctx.full()) == doctest::Approx(1.0));
    const auto psi = State::from_pure(CVector::Constant(3, 1.0 / std::sqrt(3.0)));
    CHECK(born_probability(psi, ctx.property({0})) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(born_probability(psi, Projector::identity(2)), DimensionMismatch);
}

TEST_CASE("conditional_probability examples and errors") {
    const auto rho = State::maximally_mixed(3);
    const auto p = Projector::from_matrix(diag({1, 0, 0}));
    const auto r = Projector::from_matrix(diag({1, 1, 0}));
    CHECK(conditional_probability(rho, r, r) == doctest::Approx(1.0));
    CHECK(conditional_probability(rho, Projector::from_matrix(diag({0, 0, 1})), r) ==
          doctest::Approx(0.0));
    CHECK(conditional_probability(rho, p, r) == doctest::Approx(0.5));

    try {
        conditional_probability(rho, p, ray(vec({1, 1, -1})));
        FAIL("expected non-commuting verdict");
    } catch (const UndefinedProbability& e) {
        CHECK(e.reason() == UndefinedReason::non_commuting);
        CHECK(e.residual() > 0.1);
    }
    try {
        conditional_probability(State::from_pure(basis(3, 2)), p, r);
        FAIL("expected zero conditioning");
    } catch (const UndefinedProbability& e) {
        CHECK(e.reason() == UndefinedReason::zero_conditioning);
    }
}

TEST_CASE("conditioned state reproduces the conditional") {
    Rng rng(5);
    const auto rho = random_mixed_state(3, rng);
    const auto r = Projector::from_matrix(diag({1, 1, 0}));
    const auto p = Projector::from_matrix(diag({0, 1, 0}));
    const auto star = condition_on(rho, r);
    CHECK(born_probability(star, p) == doctest::Approx(conditional_probability(rho, p, r)));
}

TEST_CASE("is_contrary examples") {
    const auto e1 = ray(basis(3, 0));
    CHECK(is_contrary(e1, ray(basis(3, 1))));
    CHECK_FALSE(is_contrary(e1, e1));
    CHECK_FALSE(is_contrary(e1, ray(vec({1, 1, 0}))));
    CHECK(is_contrary(Projector::zero(3), Projector::identity(3)));
    CHECK_FALSE(is_contrary(Projector::identity(3), Projector::identity(3)));
}

TEST_CASE("clamp_probability") {
    CHECK(clamp_probability(-1e-12) == 0.0);
    CHECK(clamp_probability(1.0 + 1e-12) == 1.0);
    CHECK(clamp_probability(0.25) == 0.25);
}

TEST_CASE("property: sum rule for contrary pairs") {
    Rng rng(101);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t d = qhist::test::random_dim(rng, 2, 8);
        const auto ctx = qhist::test::random_context(d, rng);
        if (ctx.size() < 2) continue;
        const auto rho = random_mixed_state(d, rng);
        const auto sp = qhist::test::random_subset(ctx.size(), rng);
        const auto sq = sp.complement().intersection(qhist::test::random_subset(ctx.size(), rng));
        const Property p(ctx, sp), q(ctx, sq);
        REQUIRE(is_contrary(p.projector(), q.projector()));
        const double rest = born_probability(rho, complement(join(p, q)));
        CHECK(std::abs(born_probability(rho, p) + born_probability(rho, q) + rest - 1.0) <= 5 * tau);
        CHECK(std::abs(born_probability(rho, join(p, q)) - born_probability(rho, p) -
                       born_probability(rho, q)) <= 5 * tau);
    }
}

TEST_CASE("property: lattice laws hold exactly on labels and numerically on projectors") {
    Rng rng(103);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = qhist::test::random_dim(rng, 1, 7);
        const auto ctx = qhist::test::random_context(d, rng);
        const Property p(ctx, qhist::test::random_subset(ctx.size(), rng));
        const Property q(ctx, qhist::test::random_subset(ctx.size(), rng));
        const Property s(ctx, qhist::test::random_subset(ctx.size(), rng));

        CHECK(meet(p, join(q, s)) == join(meet(p, q), meet(p, s)));
        CHECK(complement(meet(p, q)) == join(complement(p), complement(q)));
        CHECK(complement(join(p, q)) == meet(complement(p), complement(q)));
        CHECK(complement(complement(p)) == p);
        CHECK(leq(p, q) == subspace_leq(p.projector(), q.projector(), 5 * tau));

        const CMatrix pm = p.projector().matrix();
        const CMatrix qm = q.projector().matrix();
        const CMatrix sm = s.projector().matrix();
        const auto n = static_cast<Eigen::Index>(d);
        const CMatrix eye = CMatrix::Identity(n, n);
        CHECK((meet(p, q).projector().matrix() - pm * qm).norm() <= 5 * tau);
        CHECK((join(p, q).projector().matrix() - (pm + qm - pm * qm)).norm() <= 5 * tau);
        CHECK((complement(p).projector().matrix() - (eye - pm)).norm() <= 5 * tau);
        CHECK((meet(p, join(q, s)).projector().matrix() - pm * (qm + sm - qm * sm)).norm() <=
              5 * tau);
    }
}

TEST_CASE("property: no contrary certainty from commuting projectors") {
    Rng rng(107);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = qhist::test::random_dim(rng, 2, 8);
        const CMatrix u = random_unitary(d, rng);
        const auto a = qhist::test::context_in_basis(u, rng);
        const auto b = qhist::test::context_in_basis(u, rng);
        if (a.size() < 2) continue;
        const auto sp = qhist::test::random_subset(a.size(), rng);
        const Property p(a, sp), q(a, sp.complement());
        const Property r(b, qhist::test::random_subset(b.size(), rng));
        const auto rho = random_mixed_state(d, rng);
        if (born_probability(rho, r) <= 1e-3) continue;
        const double sum = conditional_probability(rho, p.projector(), r.projector()) +
                           conditional_probability(rho, q.projector(), r.projector());
        CHECK(sum <= 1.0 + 5 * tau);
    }
}
